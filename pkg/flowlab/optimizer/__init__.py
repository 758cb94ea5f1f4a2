from .lbfgs import optimize as optimize_lbfgs

optimizer = {
    "lbfgs"                             : optimize_lbfgs,
}
