"""Command-line front end: ``lexidepth <subcommand> [--config FILE] [flags]``.

Every subcommand recomputes what it needs from the inputs and writes only
its own artifacts plus a ``manifest-<subcommand>.json``. ``report`` runs
the whole chain and writes the union of those artifacts and a summary.

Exit status: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .classify import evaluate
from .config import PipelineConfig, load_config
from .corpus import merge, read_wordlist
from .depth import depth_grid, depth_report, detect_outliers
from .distance import DistanceMatrix, averaged_matrix, format_matrix, parse_matrix
from .embedding import Embedding, embed, format_embedding, stress_by_dimension
from .errors import DataError, LexidepthError, NumericError
from .hclust import agglomerate, cophenetic, cophenetic_correlation, cut, to_newick
from .partition import pam, tdd_cluster

SUBCOMMANDS = ("dist", "tree", "mds", "depth", "outliers", "cluster", "pam", "classify", "report")
SAMPLE = "@sample"


def sample_path() -> Path:
    return Path(str(resources.files("lexidepth") / "data" / "sample_wordlist.tsv"))


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Run:
    """Holds the config, the output directory and everything computed so far."""

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.written: dict[str, str] = {}
        self.source: str | None = None
        self._matrix = None
        self._embedding = None
        self.summary: dict = {}

    def write(self, name: str, text: str):
        path = self.out / name
        path.write_text(text, encoding="utf-8", newline="\n")
        self.written[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    def input_paths(self) -> list[str]:
        paths = [str(sample_path()) if p == SAMPLE else p for p in self.cfg.input]
        if self.cfg.matrix:
            paths = [self.cfg.matrix]
        if self.cfg.classes:
            paths.append(self.cfg.classes)
        return paths

    def manifest(self, subcommand: str):
        config = self.cfg.to_dict()
        config.pop("out")
        inputs = {}
        for p in self.input_paths():
            inputs[p] = _sha256(p) if Path(p).exists() else None
        doc = {
            "tool": "lexidepth",
            "version": __version__,
            "subcommand": subcommand,
            "seed": self.cfg.seed,
            "config": config,
            "inputs": inputs,
            "artifacts": dict(sorted(self.written.items())),
        }
        self.write(f"manifest-{subcommand}.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")

    # ------------------------------------------------------------ inputs

    def _delimiter(self, path: str) -> str:
        d = self.cfg.delimiter
        if d == "auto":
            return "," if path.lower().endswith(".csv") else "\t"
        return {"tab": "\t", "comma": ","}.get(d, d)

    def matrix(self) -> DistanceMatrix:
        if self._matrix is None:
            try:
                self._matrix = self._load_matrix()
            except LexidepthError as exc:
                if self.source and not getattr(exc, "source", None):
                    exc.source = self.source
                raise
        return self._matrix

    def _load_matrix(self) -> DistanceMatrix:
        if self.cfg.matrix:
            self.source = self.cfg.matrix
            with open(self.cfg.matrix, encoding="utf-8", newline="") as fh:
                return parse_matrix(fh.read())
        wl = None
        for p in self.cfg.input:
            path = str(sample_path()) if p == SAMPLE else p
            self.source = path
            part = read_wordlist(path, self._delimiter(path), self.cfg.missing)
            wl = part if wl is None else merge(wl, part)
        self.source = None
        normalize = None if self.cfg.normalize == "none" else self.cfg.normalize
        return averaged_matrix(wl, self.cfg.min_support, normalize)

    def embedding(self) -> Embedding:
        if self._embedding is None:
            cfg = self.cfg
            kwargs = {}
            if cfg.mds == "nonmetric":
                kwargs = {"seed": cfg.seed, "max_iter": cfg.mds_max_iter}
            self._embedding = embed(self.matrix(), cfg.mds, cfg.dim, **kwargs)
        return self._embedding

    def class_labels(self) -> dict[str, str]:
        self.source = self.cfg.classes
        with open(self.cfg.classes, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
        if rows and [c.strip().lower() for c in rows[0][:2]] == ["label", "class"]:
            rows = rows[1:]
        out = {}
        for lineno, row in enumerate(rows, 1):
            if len(row) < 2:
                exc = DataError(f"row {lineno}: expected label,class")
                exc.source = self.cfg.classes
                raise exc
            out[row[0].strip()] = row[1].strip()
        self.source = None
        return out


# ---------------------------------------------------------------- stages


def stage_dist(run: Run):
    dm = run.matrix()
    run.write("distances.csv", format_matrix(dm, run.cfg.precision))
    run.write("support.csv", format_matrix(dm, which="support"))
    run.summary["dist"] = {
        "languages": len(dm),
        "min_support": int(dm.support[~np.eye(len(dm), dtype=bool)].min()) if len(dm) > 1 else 0,
    }


def stage_tree(run: Run):
    cfg = run.cfg
    dm = run.matrix()
    tree = agglomerate(dm, cfg.linkage)
    run.write(f"tree-{cfg.linkage}.nwk", to_newick(tree, cfg.precision) + "\n")
    run.write(f"cophenetic-{cfg.linkage}.csv", format_matrix(cophenetic(tree), cfg.precision))
    info = {"linkage": cfg.linkage, "cophenetic_correlation": cophenetic_correlation(dm, tree)}
    if cfg.tree_k:
        part = cut(tree, cfg.tree_k)
        rows = "".join(f"{lab},{c}\n" for lab, c in zip(part.labels, part.assignment))
        run.write(f"clusters-{cfg.linkage}.csv", "label,cluster\n" + rows)
        info["clusters"] = {str(c): labs for c, labs in part.clusters().items()}
    run.summary["tree"] = info


def stage_mds(run: Run):
    cfg = run.cfg
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        e = run.embedding()
    run.write("embedding.csv", format_embedding(e))
    info = {"method": e.method, "dimension": e.dimension}
    if e.eigenvalues is not None:
        total = float(np.clip(e.eigenvalues, 0, None).sum())
        lines = ["component,eigenvalue,proportion"]
        for i, v in enumerate(e.eigenvalues, 1):
            share = max(v, 0.0) / total if total > 0 else 0.0
            lines.append(f"{i},{v:.9f},{share:.6f}")
        run.write("scree.csv", "\n".join(lines) + "\n")
        info["eigenvalues"] = [float(v) for v in e.eigenvalues[: max(cfg.dim, 3)]]
    if e.method == "nonmetric":
        dims = [k for k in (1, 2, 3, cfg.dim) if k <= len(e) - 1]
        table = stress_by_dimension(
            run.matrix(), sorted(set(dims)), seed=cfg.seed, max_iter=cfg.mds_max_iter
        )
        run.write("stress.csv", "dimension,stress\n" + "".join(f"{k},{s:.9f}\n" for k, s in table))
        info["stress"] = e.stress
    info["warnings"] = sorted({str(w.message) for w in caught})
    if cfg.plots:
        from .plotting import scatter_svg

        run.write("embedding.svg", scatter_svg(e, f"{e.method} MDS"))
    run.summary["mds"] = info


def stage_depth(run: Run):
    cfg = run.cfg
    e = run.embedding()
    report = depth_report(e, cfg.depth)
    run.write("depth.csv", report.to_csv())
    grid = depth_grid(e, cfg.depth, (cfg.grid, cfg.grid), cfg.margin)
    run.write("depth-grid.csv", grid.to_csv())
    if cfg.plots:
        from .plotting import contour_svg, heatmap_svg

        run.write("depth-heatmap.svg", heatmap_svg(grid, e, f"{cfg.depth} depth"))
        run.write("depth-contour.svg", contour_svg(grid, e, f"{cfg.depth} depth contours"))
    deepest = e.labels[int(np.argmax(report.depths))]
    run.summary["depth"] = {"method": cfg.depth, "deepest": deepest}


def stage_outliers(run: Run):
    cfg = run.cfg
    e = run.embedding()
    report = detect_outliers(e, cfg.level, cfg.resamples, cfg.seed, cfg.depth)
    run.write("outliers.csv", report.to_csv())
    run.write("outliers.json", report.to_json())
    if cfg.plots:
        from .plotting import scatter_svg

        run.write("outliers.svg", scatter_svg(e, f"outliers at level {cfg.level}", highlight=set(report.outliers)))
    run.summary["outliers"] = {
        "level": cfg.level,
        "threshold": report.threshold,
        "flagged": report.outliers,
    }


def stage_cluster(run: Run):
    cfg = run.cfg
    e = run.embedding()
    part = tdd_cluster(e, cfg.k, cfg.trim, cfg.seed, cfg.max_iter)
    run.write("clusters-tdd.csv", part.to_csv())
    run.write("clusters-tdd.json", part.to_json())
    if cfg.plots:
        from .plotting import scatter_svg

        groups = {lab: ("trimmed" if a < 0 else f"cluster {a}") for lab, a in zip(part.labels, part.assignment)}
        run.write("clusters-tdd.svg", scatter_svg(e, "trimmed L1-depth clusters", groups=groups))
    run.summary["cluster"] = part.to_dict()


def stage_pam(run: Run):
    cfg = run.cfg
    part = pam(run.matrix(), cfg.k, cfg.seed)
    run.write("clusters-pam.csv", part.to_csv())
    run.write("clusters-pam.json", part.to_json())
    run.summary["pam"] = part.to_dict()


def stage_classify(run: Run):
    cfg = run.cfg
    if not cfg.classes:
        raise LexidepthError("classify needs --classes FILE (label,class CSV)")
    labels = run.class_labels()
    e = run.embedding()
    keep = [lab for lab in e.labels if lab in labels]
    report = evaluate(e.subset(keep), labels, cfg.split, cfg.seed, cfg.repeats, cfg.depth, cfg.fallback_k)
    run.write("classification.json", report.to_json())
    run.write("classification.txt", report.to_text())
    run.summary["classify"] = {
        "mean_accuracy": report.mean,
        "sd": report.std,
        "repeats": cfg.repeats,
        "unlabelled": [lab for lab in e.labels if lab not in labels],
    }


STAGES = {
    "dist": stage_dist,
    "tree": stage_tree,
    "mds": stage_mds,
    "depth": stage_depth,
    "outliers": stage_outliers,
    "cluster": stage_cluster,
    "pam": stage_pam,
    "classify": stage_classify,
}
REPORT_CHAIN = ("dist", "tree", "mds", "outliers", "cluster", "classify")


def _markdown(run: Run) -> str:
    s = run.summary
    cfg = run.cfg
    lines = ["# lexidepth report", "", f"seed {cfg.seed}, tool version {__version__}", ""]
    if "dist" in s:
        lines += ["## Distances", "", f"{s['dist']['languages']} languages; "
                  f"smallest pairwise support {s['dist']['min_support']} meaning(s).", ""]
    if "tree" in s:
        t = s["tree"]
        lines += ["## Hierarchical clustering", "", f"{t['linkage']} linkage, cophenetic correlation "
                  f"{t['cophenetic_correlation']:.4f}.", ""]
    if "mds" in s:
        m = s["mds"]
        lines += ["## Embedding", "", f"{m['method']} MDS in {m['dimension']} dimension(s)."]
        if "eigenvalues" in m:
            lines.append("Leading eigenvalues: " + ", ".join(f"{v:.4f}" for v in m["eigenvalues"]) + ".")
        if m.get("stress") is not None:
            lines.append(f"Stress-1: {m['stress']:.6f}.")
        lines += [f"Warning: {w}" for w in m["warnings"]] + [""]
    if "outliers" in s:
        o = s["outliers"]
        flagged = ", ".join(o["flagged"]) or "none"
        lines += ["## Outliers", "", f"Level {o['level']}, depth cutoff {o['threshold']:.6f}. Flagged: {flagged}.", ""]
    if "cluster" in s:
        c = s["cluster"]
        lines += ["## Trimmed depth clustering", "", f"k = {c['k']}, centres: {', '.join(c['centers'])}."]
        for cid, labs in c["clusters"].items():
            lines.append(f"- cluster {cid}: {', '.join(labs)}")
        lines += [f"- trimmed: {', '.join(c['trimmed']) or 'none'}", ""]
    if "classify" in s:
        c = s["classify"]
        lines += ["## Classification", "", f"Mean holdout accuracy {c['mean_accuracy']:.4f} "
                  f"(sd {c['sd']:.4f}) over {c['repeats']} repeat(s).", ""]
    return "\n".join(lines)


def run_subcommand(name: str, cfg: PipelineConfig) -> Run:
    """Run one subcommand and write its artifacts; errors propagate."""
    run = Run(cfg)
    if name == "report":
        for stage in REPORT_CHAIN:
            if stage == "classify" and not cfg.classes:
                continue
            STAGES[stage](run)
        run.write("report.json", json.dumps(run.summary, indent=2, sort_keys=True) + "\n")
        run.write("report.md", _markdown(run))
    else:
        STAGES[name](run)
    run.manifest(name)
    return run


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    add = common.add_argument
    add("--config", help="flat key = value file; flags override it")
    add("--input", action="append", help=f"wordlist file (repeatable, merged); {SAMPLE} for the bundled sample")
    add("--matrix", help="precomputed distance matrix CSV instead of wordlists")
    add("--classes", help="CSV of label,class for classify")
    add("--delimiter", help="auto, tab, comma or a literal character")
    add("--missing", help="missing-form marker (default ?)")
    add("--normalize", choices=["none", "length"])
    add("--min-support", type=int, dest="min_support")
    add("--precision", type=int)
    add("--linkage", choices=["single", "complete", "average"])
    add("--tree-k", type=int, dest="tree_k", help="also cut the tree into this many clusters")
    add("--mds", choices=["classical", "nonmetric"])
    add("--dim", type=int)
    add("--mds-max-iter", type=int, dest="mds_max_iter")
    add("--depth", choices=["spatial", "l1"])
    add("--level", type=float)
    add("--resamples", type=int)
    add("--grid", type=int)
    add("--margin", type=float)
    add("-k", "--k", type=int, dest="k")
    add("--trim", type=float)
    add("--max-iter", type=int, dest="max_iter")
    add("--split", type=float)
    add("--repeats", type=int)
    add("--fallback-k", type=int, dest="fallback_k")
    add("--seed", type=int)
    add("--out", help="output directory (env LEXIDEPTH_OUTPUT_DIR, else ./lexidepth-out)")
    add("--plots", dest="plots", action="store_true", default=None)
    add("--no-plots", dest="plots", action="store_false")

    parser = _Parser(prog="lexidepth", description="Lexicostatistics with data depth.")
    parser.add_argument("--version", action="version", version=f"lexidepth {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else 1
    overrides = {k: v for k, v in vars(args).items() if k not in ("subcommand", "config")}
    try:
        cfg = load_config(args.config, overrides)
        run_subcommand(args.subcommand, cfg)
    except LexidepthError as exc:
        where = f"{exc.source}: " if getattr(exc, "source", None) else ""
        print(f"lexidepth: error: {where}{exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"lexidepth: error: {exc}", file=sys.stderr)
        return DataError.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"lexidepth: error: numeric failure: {exc}", file=sys.stderr)
        return NumericError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
