import numpy as np

from raypath.core.ecdf import CdfSource, cdf_from_csv, jump_points, temporal_cdf
from raypath.core.mixture import (
    auto_segment,
    fit_cdf,
    fit_report_csv,
    gmm_cdf,
    gmm_to_dict,
    gmm_to_json,
    model_fit_error,
)
from raypath.services.config.settings import DEFAULT_FIT_SETTINGS
from raypath.shared.errors import UsageError
from raypath.utils.files import dumps_json, read_text
from raypath.utils.plots import cdf_svg

from .base import (
    Command,
    CommandResult,
    add_input_arguments,
    check_ray,
    load_sequence,
    parse_floats,
    parse_ray,
    require,
)
from ..table import dicts_to_pt


class FitGmmCommand(Command):
    name = "fit-gmm"
    help = "Segment a range CDF into clusters and fit one weighted normal per cluster"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("--cdf", help="CDF CSV (x,F) to fit")
        add_input_arguments(parser)
        parser.add_argument("--ray", help="With --input: fit this raypath's temporal CDF")
        parser.add_argument("--thresholds", help="Ascending CDF values to cut at, e.g. 0.14,0.38,0.68")
        parser.add_argument(
            "--min-gap", type=float, default=DEFAULT_FIT_SETTINGS.min_gap, help="Gap (m) between clusters"
        )
        parser.add_argument(
            "--sigma-floor", type=float, default=DEFAULT_FIT_SETTINGS.sigma_floor, help="Smallest component std (m)"
        )
        parser.add_argument("--svg", action="store_true", help="Also plot the CDF against the scaled mixture CDF")

    def _validate_params(self, args):
        if (args.cdf is None) == (args.input is None):
            raise UsageError("give exactly one of --cdf or --input")
        if args.input is not None:
            require(args, "ray")
            parse_ray(args.ray)
        if args.thresholds is not None:
            parse_floats(args.thresholds, "thresholds")
        if not args.min_gap > 0 or not args.sigma_floor > 0:
            raise UsageError("--min-gap and --sigma-floor must be positive")

    def _load_cdf(self, args):
        if args.cdf is not None:
            return cdf_from_csv(read_text(args.cdf), CdfSource("csv"))
        seq = load_sequence(args)
        ray = parse_ray(args.ray)
        check_ray(seq, ray)
        return temporal_cdf(seq, ray)

    def execute(self, args):
        cdf = self._load_cdf(args)
        if args.thresholds is not None:
            thresholds = parse_floats(args.thresholds, "thresholds")
        else:
            thresholds = auto_segment(cdf, args.min_gap)
        gmm, clusters = fit_cdf(cdf, thresholds, sigma_floor=args.sigma_floor)
        error = model_fit_error(gmm, cdf)
        record = {
            "source": str(cdf.source),
            "thresholds": thresholds,
            "model_fit_error": error,
            "return_fraction": cdf.return_fraction,
            **gmm_to_dict(gmm),
        }
        outputs = {
            "gmm.json": gmm_to_json(gmm),
            "fit.csv": fit_report_csv(gmm, clusters),
            "fit.json": dumps_json(record),
        }
        if args.svg:
            points = jump_points(cdf)
            xs = np.linspace(points[0] - 4 * gmm.sigmas[0], points[-1] + 4 * gmm.sigmas[-1], 400)
            outputs["fit.svg"] = cdf_svg([cdf], curves=[(xs, gmm_cdf(gmm, xs) * cdf.return_fraction, "mixture")])
        rows = [
            {"alpha": c.alpha, "mu": c.mu, "sigma": c.sigma, "count": len(cluster)}
            for c, cluster in zip(gmm.clusters, clusters)
        ]
        self.log_print.info("\n" + dicts_to_pt(rows).get_string(), with_time=False)
        message = f"{len(gmm)} clusters, sup-norm fit error {error:.4g}"
        return CommandResult(True, message, outputs, "gmm.json")
