from .plot import show_profile, show_cocycle_norms, show_defect_grid
