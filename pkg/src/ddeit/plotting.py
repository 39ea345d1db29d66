"""Optional SVG rendering of already computed series. Needs matplotlib."""

from __future__ import annotations

from pathlib import Path


class PlottingUnavailable(RuntimeError):
    pass


def _pyplot():
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise PlottingUnavailable("SVG output needs matplotlib (pip install artifact[plot])") from exc
    # fixed metadata keeps repeated renders byte-identical
    plt.rcParams["svg.hashsalt"] = "ddeit"
    return plt


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def spectrum_svg(path: Path, series: dict) -> Path:
    plt = _pyplot()
    fig, (ax_im, ax_re) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    for tag, (x, chi) in series.items():
        ax_im.plot(x, chi.imag, label=tag)
        ax_re.plot(x, chi.real, label=tag)
    ax_im.set_ylabel("Im chi")
    ax_re.set_ylabel("Re chi")
    ax_re.set_xlabel("delta_p (MHz)")
    ax_im.legend(fontsize="small")
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out


def sweep_svg(path: Path, xcol: str, ycols: list[str], rows: list[dict]) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    x = [r.get(xcol) for r in rows]
    for col in ycols:
        y = [r.get(col, float("nan")) for r in rows]
        style = "--" if col.endswith("closed") or "closed" in col else "-"
        ax.plot(x, [float("nan") if v is None else v for v in y], style, label=col)
    ax.set_xlabel(xcol)
    ax.legend(fontsize="small")
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out
