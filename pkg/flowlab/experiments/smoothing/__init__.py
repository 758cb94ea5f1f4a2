from .mollification_profile import MollificationProfile
from .cocycle_decomposition import CocycleDecomposition
