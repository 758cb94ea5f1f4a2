import copy
import numpy as np
from scipy.optimize import minimize

def optimize(model, p_seed, iteration, initp=None):
    """Minimize ``model.step`` with L-BFGS-B, recording iterations through ``model.callback``.

    Args:
        model (Stepper): objective wrapper exposing step, callback and n_param
        p_seed (int): seed for the random start when ``initp`` is None
        iteration (int): maximum number of iterations
        initp (np.ndarray, optional): starting point
    Returns:
        OptimizeResult: scipy result
    """
    n_param = model.n_param

    rng = np.random.default_rng(p_seed)
    if initp is None:
        param = rng.normal(size=n_param)
    else:
        param = np.asarray(initp, dtype=float)

    res  = minimize(
        model.step,
        copy.copy(param),
        options = {'maxiter': iteration, 'ftol':1e-15, 'gtol':1e-12},
        method  = 'L-BFGS-B',
        callback=model.callback
    )
    return res

def test_lbfgs_quadratic():
    from ..objects import Stepper
    target = np.array([1., -2., 0.5])
    def execute(phi):
        return {"score": float(np.sum((phi - target)**2)), "step": 1, "register": {}}
    stepper = Stepper(execute, n_param=3, verbose=False)
    res = optimize(stepper, p_seed=0, iteration=100)
    assert np.allclose(res.x, target, atol=1e-5)
    assert len(stepper.score) > 0

if __name__ == "__main__":
    test_lbfgs_quadratic()
