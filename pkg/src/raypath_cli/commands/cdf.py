"""Temporal and spatial CDF extraction and CDF comparison."""
import argparse

from raypath.core.ecdf import (
    CdfSource,
    cdf_from_csv,
    cdf_to_csv,
    ks_statistic,
    pooled_spatial_cdf,
    spatial_cdf,
    spatial_cdfs,
    temporal_cdf,
)
from raypath.core.mocomp import match_trace, trace_cdf, trace_to_csv
from raypath.services.config.settings import DEFAULT_MATCH_SETTINGS
from raypath.shared.errors import FormatError, UsageError
from raypath.utils.files import dumps_json, read_text
from raypath.utils.plots import cdf_svg

from .base import (
    Command,
    CommandResult,
    add_input_arguments,
    cdf_record,
    check_frame,
    check_ray,
    load_sequence,
    parse_patch,
    parse_ray,
    require,
)


def add_match_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--radius", type=int, default=DEFAULT_MATCH_SETTINGS.radius, help="Search radius in pixels")
    parser.add_argument("--patch", default=DEFAULT_MATCH_SETTINGS.patch, help="Patch size, e.g. 5x5")
    parser.add_argument(
        "--min-pairs", type=int, default=DEFAULT_MATCH_SETTINGS.min_pairs, help="Fewest comparable cells per patch"
    )


def validate_match(args: argparse.Namespace) -> None:
    if args.radius < 0:
        raise UsageError(f"--radius must be >= 0, got {args.radius}")
    if args.min_pairs < 1:
        raise UsageError(f"--min-pairs must be >= 1, got {args.min_pairs}")
    parse_patch(args.patch)


class TcdfCommand(Command):
    name = "tcdf"
    help = "Temporal CDF of one raypath across frames (optionally motion compensated)"

    @staticmethod
    def add_arguments(parser):
        add_input_arguments(parser)
        parser.add_argument("--ray", help="Raypath as i,j (row, column)")
        parser.add_argument("--compensate", action="store_true", help="Track the raypath with patch matching")
        add_match_arguments(parser)
        parser.add_argument("--svg", action="store_true", help="Also write a step plot")

    def _validate_params(self, args):
        require(args, "input", "ray")
        parse_ray(args.ray)
        validate_match(args)

    def execute(self, args):
        seq = load_sequence(args)
        ray = parse_ray(args.ray)
        check_ray(seq, ray)
        outputs = {}
        if args.compensate:
            spec = parse_patch(args.patch)
            trace = match_trace(seq, ray, args.radius, spec, args.min_pairs)
            cdf = trace_cdf(seq, ray, trace)
            cdf_name = "compensated.csv"
        else:
            cdf = temporal_cdf(seq, ray)
            cdf_name = "tcdf.csv"
        outputs[cdf_name] = cdf_to_csv(cdf)
        if args.compensate:
            outputs["trace.csv"] = trace_to_csv(trace)
        record = cdf_record(cdf, seq, ray)
        outputs["stats.json"] = dumps_json(record)
        if args.svg:
            outputs["tcdf.svg"] = cdf_svg([cdf])
        self.show(record)
        return CommandResult(True, f"{cdf.source}: {cdf.count} returns over {seq.count} frames", outputs, cdf_name)


class ScdfCommand(Command):
    name = "scdf"
    help = "Spatial CDF of a raypath's neighborhood in one frame (or every frame)"

    @staticmethod
    def add_arguments(parser):
        add_input_arguments(parser)
        parser.add_argument("--ray", help="Raypath as i,j (row, column)")
        parser.add_argument("--frame", type=int, default=0, help="Frame index (default 0)")
        parser.add_argument("--patch", default="5x5", help="Neighborhood size, e.g. 3x3 or 5x5")
        group = parser.add_mutually_exclusive_group()
        group.add_argument("--all-frames", action="store_true", help="One CDF block per frame")
        group.add_argument("--pooled", action="store_true", help="Pool the neighborhood over all frames")
        parser.add_argument("--svg", action="store_true", help="Also write a step plot")

    def _validate_params(self, args):
        require(args, "input", "ray")
        parse_ray(args.ray)
        parse_patch(args.patch)

    def execute(self, args):
        seq = load_sequence(args)
        ray = parse_ray(args.ray)
        spec = parse_patch(args.patch)
        check_ray(seq, ray)
        if args.all_frames:
            cdfs = spatial_cdfs(seq, ray, spec)
            text = "".join(f"# {cdf.source}\n" + cdf_to_csv(cdf) for cdf in cdfs)
        elif args.pooled:
            cdfs = [pooled_spatial_cdf(seq, ray, spec)]
            text = cdf_to_csv(cdfs[0])
        else:
            check_frame(seq, args.frame)
            cdfs = [spatial_cdf(seq[args.frame], ray, spec, args.frame)]
            text = cdf_to_csv(cdfs[0])
        outputs = {"scdf.csv": text}
        if args.svg:
            outputs["scdf.svg"] = cdf_svg(cdfs)
        if len(cdfs) == 1:
            self.show(cdf_record(cdfs[0]))
        return CommandResult(True, f"{len(cdfs)} spatial CDF(s) over {spec} neighborhoods", outputs, "scdf.csv")


class CompareCommand(Command):
    name = "compare"
    help = "Kolmogorov-Smirnov distance between two CDF files"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("--a", help="First CDF CSV (x,F)")
        parser.add_argument("--b", help="Second CDF CSV (x,F)")

    def _validate_params(self, args):
        require(args, "a", "b")

    def _load(self, path):
        try:
            return cdf_from_csv(read_text(path), CdfSource("csv"))
        except FormatError as e:
            raise UsageError(f"{path}: {e}")

    def execute(self, args):
        a, b = self._load(args.a), self._load(args.b)
        distance, location = ks_statistic(a, b)
        record = {
            "ks_distance": distance,
            "location": location,
            "a_return_fraction": a.return_fraction,
            "b_return_fraction": b.return_fraction,
        }
        self.show(record)
        return CommandResult(True, f"KS distance {distance:.6g}", {"compare.json": dumps_json(record)}, "compare.json")
