from dataclasses import asdict

from raypath.services.regimpact import RegistrationConfig, bias_report, report_to_csv
from raypath.services.regimpact.experiment import ALGORITHMS, REFERENCES, SCENES
from raypath.shared.errors import InvalidArgumentError, UsageError
from raypath.utils.files import dumps_json

from .base import Command, CommandResult, parse_floats, parse_names, require
from ..table import dicts_to_pt

DEFAULTS = RegistrationConfig()


class RegExperimentCommand(Command):
    name = "reg-experiment"
    help = "Sweep gap sizes and measure how two-return raypaths bias ICP and NDT-lite"

    @staticmethod
    def add_arguments(parser):
        parser.add_argument("--scene", choices=SCENES, default=DEFAULTS.scene, help="Planar scene layout")
        parser.add_argument("--deltas", default="0.05,0.1,0.2", help="Gaps (m) between the two surfaces")
        parser.add_argument("--fraction", type=float, default=DEFAULTS.fraction, help="Share of two-return raypaths")
        parser.add_argument("--trials", type=int, default=100, help="Monte-Carlo trials per cell")
        parser.add_argument("--algorithms", default=",".join(ALGORITHMS), help="Subset of icp,ndt")
        parser.add_argument("--references", default=",".join(REFERENCES), help="Subset of scan,map")
        parser.add_argument("--r-max", type=float, default=DEFAULTS.r_max, help="ICP association radius (m)")
        parser.add_argument("--icp-iterations", type=int, default=DEFAULTS.icp_iterations)
        parser.add_argument("--voxel-size", type=float, default=DEFAULTS.voxel_size, help="NDT-lite voxel side (m)")
        parser.add_argument("--ndt-iterations", type=int, default=DEFAULTS.ndt_iterations)
        parser.add_argument("--noise", type=float, default=DEFAULTS.noise, help="Point noise std (m)")
        parser.add_argument("--rotation-deg", type=float, default=DEFAULTS.rotation_deg, help="Largest true rotation")
        parser.add_argument("--translation", type=float, default=DEFAULTS.translation, help="Largest true shift (m)")
        parser.add_argument("--seed", type=int, help="Random seed (required)")
        parser.add_argument("--workers", type=int, default=1, help="Worker processes for the sweep")

    def _config(self, args) -> RegistrationConfig:
        try:
            return RegistrationConfig.from_dict(vars(args))
        except InvalidArgumentError as e:
            raise UsageError(str(e))

    def _validate_params(self, args):
        require(args, "seed")
        if args.trials < 1 or args.workers < 1:
            raise UsageError("--trials and --workers must be >= 1")
        if any(d < 0 for d in parse_floats(args.deltas, "deltas")):
            raise UsageError("--deltas must be >= 0")
        parse_names(args.algorithms, "algorithms", ALGORITHMS)
        parse_names(args.references, "references", REFERENCES)
        self._config(args)

    def execute(self, args):
        cfg = self._config(args)
        deltas = parse_floats(args.deltas, "deltas")
        algorithms = parse_names(args.algorithms, "algorithms", ALGORITHMS)
        references = parse_names(args.references, "references", REFERENCES)
        rows = bias_report(cfg, deltas, args.trials, algorithms, references, args.workers)
        experiment = {
            **asdict(cfg),
            "deltas": deltas,
            "trials": args.trials,
            "algorithms": algorithms,
            "references": references,
        }
        self.log_print.info("\n" + dicts_to_pt([r.as_dict() for r in rows]).get_string(), with_time=False)
        outputs = {"report.csv": report_to_csv(rows), "experiment.json": dumps_json(experiment)}
        return CommandResult(True, f"{len(rows)} cells x {args.trials} trials", outputs, "report.csv")
