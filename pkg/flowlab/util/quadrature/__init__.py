from .gauss import gauss_hermite, truncated_gauss_hermite, gauss_legendre, TimeOrderedGrid, time_ordered_grid
