"""Optional SVG step plots of empirical CDFs (and fitted model curves)."""
import io
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.ecdf import EmpiricalCdf, eval_cdf, eval_cdf_left, jump_points

Curve = Tuple[np.ndarray, np.ndarray, str]


def step_coordinates(cdf: EmpiricalCdf) -> Tuple[np.ndarray, np.ndarray]:
    """Vertices of the CDF's staircase, starting at zero just left of the first jump."""
    xs = jump_points(cdf)
    if xs.size == 0:
        return np.empty(0), np.empty(0)
    ys = np.array([eval_cdf(cdf, x) for x in xs])
    return np.concatenate([[xs[0]], xs]), np.concatenate([[eval_cdf_left(cdf, xs[0])], ys])


def cdf_svg(
    cdfs: Sequence[EmpiricalCdf],
    labels: Optional[Sequence[str]] = None,
    curves: Sequence[Curve] = (),
    title: str = "",
) -> str:
    """Render CDF step plots to an SVG document.

    The output is byte-identical for identical inputs: the SVG id salt is
    fixed and no creation date is embedded.

    Args:
        cdfs: Empirical CDFs drawn as post-steps
        labels: Legend entry per CDF (defaults to each CDF's source tag)
        curves: Extra (x, y, label) lines, e.g. a scaled mixture CDF
        title: Axes title

    Returns:
        str: The SVG document
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = list(labels) if labels is not None else [str(c.source) for c in cdfs]
    with matplotlib.rc_context({"svg.hashsalt": "raypath", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(7, 4), dpi=100)
        for cdf, label in zip(cdfs, labels):
            xs, ys = step_coordinates(cdf)
            if xs.size:
                ax.step(xs, ys, where="post", label=label)
        for x, y, label in curves:
            ax.plot(x, y, linestyle="--", label=label)
        ax.set_xlabel("range (m)")
        ax.set_ylabel("cumulative fraction")
        ax.set_ylim(0.0, 1.05)
        if title:
            ax.set_title(title)
        if labels or curves:
            ax.legend(loc="lower right")
        fig.tight_layout()
        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buffer.getvalue()
