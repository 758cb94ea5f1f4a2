from .method_agreement import MethodAgreement
from .cocycle_law import CocycleLaw
from .distance_bounds import DistanceBounds
