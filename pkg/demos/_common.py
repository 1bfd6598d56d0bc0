"""Small helpers shared by the demo scripts."""

from pathlib import Path

OUT = Path(__file__).with_name("output")


def save_figure(fig, name):
    """Write ``fig`` to ``demos/output/<name>.png`` and return the path."""
    OUT.mkdir(exist_ok=True)
    path = OUT / f"{name}.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    return path


def pyplot():
    """``matplotlib.pyplot`` with a file-only backend, or ``None`` when unavailable."""
    try:
        import matplotlib
    except ImportError:
        return None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt
