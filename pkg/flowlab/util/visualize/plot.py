import logging
import numpy as np
import matplotlib.pyplot as plt

logger = logging.getLogger(__name__)

plt.rcParams['ytick.minor.visible'] = False
plt.rcParams['xtick.top']           = True
plt.rcParams['ytick.right']         = True
plt.rcParams['xtick.direction']     = 'in'
plt.rcParams['ytick.direction']     = 'in'
plt.rcParams['font.family']         = 'sans-serif'
plt.rcParams["mathtext.fontset"]    = 'stixsans'
plt.rcParams['xtick.major.width']   = 0.5
plt.rcParams['ytick.major.width']   = 0.5
plt.rcParams['font.size']           = 16
plt.rcParams['axes.linewidth']      = 1.0

def _finish(path):
    """Save to ``path`` when given, else show; the figure is closed either way."""
    if path is None:
        plt.show()
    else:
        plt.savefig(path, bbox_inches="tight")
        logger.info("figure written to %s", path)
    plt.close()

def show_profile(rows, path=None, figsize=(6,5)):
    """log-log plot of ||A_n - A||_F against n for smoothing profile rows."""
    n    = np.array([row.n for row in rows])
    diff = np.array([row.diff_frobenius for row in rows])
    plt.figure(figsize=figsize)
    plt.loglog(n, np.maximum(diff, 1e-17), 'ko-')
    plt.xlabel(r'$n$')
    plt.ylabel(r'$\|A_n - A\|_F$')
    _finish(path)

def show_cocycle_norms(times, norms, path=None, figsize=(6,5)):
    """||u_t||_F against t, one line per method.

    Arguments:
        times {array} -- time grid
        norms {dict} -- method -> norms on the grid
    """
    plt.figure(figsize=figsize)
    for method, values in sorted(norms.items()):
        plt.plot(times, values, '.-', label=method)
    plt.xlabel(r'$t$')
    plt.ylabel(r'$\|u_t\|_F$')
    plt.legend(fontsize=12)
    _finish(path)

def show_defect_grid(points, defects, path=None, figsize=(6,5)):
    plt.figure(figsize=figsize)
    plt.imshow(np.log10(np.maximum(defects, 1e-18)), origin="lower",
               extent=[points[0], points[-1], points[0], points[-1]])
    plt.colorbar(label=r'$\log_{10}$ defect')
    plt.xlabel(r'$t$')
    plt.ylabel(r'$s$')
    _finish(path)

def test_plots_are_written(tmp_path):
    import matplotlib
    matplotlib.use("Agg")
    from collections import namedtuple
    Row = namedtuple("Row", ["n", "diff_frobenius"])
    show_profile([Row(1., 0.2), Row(10., 0.02)], path=str(tmp_path/"profile.png"))
    show_cocycle_norms(np.linspace(0, 1, 5), {"ode": np.ones(5)}, path=str(tmp_path/"norms.png"))
    show_defect_grid(np.linspace(-1, 1, 3), np.zeros((3, 3)), path=str(tmp_path/"defect.png"))
    for name in ("profile.png", "norms.png", "defect.png"):
        assert (tmp_path/name).stat().st_size > 0
