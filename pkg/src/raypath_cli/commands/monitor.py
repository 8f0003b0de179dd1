from raypath.core.monitor import (
    MonitorConfig,
    evaluate_monitor,
    mask_from_pgm,
    mask_to_pgm,
    scan_frame,
    verdict_mask,
    verdicts_to_csv,
)
from raypath.shared.errors import InvalidArgumentError, UsageError
from raypath.utils.files import dumps_json, read_text

from .base import Command, CommandResult, add_input_arguments, check_frame, load_sequence, require

DEFAULTS = MonitorConfig()


class MonitorCommand(Command):
    name = "monitor"
    help = "Flag multi-return raypaths in one frame from their spatial CDFs"

    @staticmethod
    def add_arguments(parser):
        add_input_arguments(parser, slicing=False)
        parser.add_argument("--frame", type=int, default=0, help="Frame index (default 0)")
        parser.add_argument("--patch", default=str(DEFAULTS.spec), help="Neighborhood size, e.g. 5x5")
        parser.add_argument("--span-threshold", type=float, default=DEFAULTS.span_threshold, help="Range spread (m)")
        parser.add_argument("--min-gap", type=float, default=DEFAULTS.min_gap, help="Gap (m) separating clusters")
        parser.add_argument(
            "--min-clusters", type=int, default=DEFAULTS.min_cluster_count, help="Cluster count that flags a raypath"
        )
        parser.add_argument(
            "--max-nonreturn", type=float, default=DEFAULTS.max_nonreturn_fraction, help="Tolerated non-return share"
        )
        parser.add_argument("--labels", help="Ground-truth PGM mask (e.g. from simulate) to grade the verdicts")

    def _monitor_config(self, args) -> MonitorConfig:
        try:
            return MonitorConfig.from_dict(
                {
                    "patch": args.patch,
                    "span_threshold": args.span_threshold,
                    "min_gap": args.min_gap,
                    "min_cluster_count": args.min_clusters,
                    "max_nonreturn_fraction": args.max_nonreturn,
                }
            )
        except InvalidArgumentError as e:
            raise UsageError(str(e))

    def _validate_params(self, args):
        require(args, "input")
        self._monitor_config(args)

    def execute(self, args):
        cfg = self._monitor_config(args)
        seq = load_sequence(args)
        check_frame(seq, args.frame)
        img = seq[args.frame]
        verdicts = scan_frame(img, cfg)
        mask = verdict_mask(verdicts, img.rows, img.cols)
        outputs = {"verdicts.csv": verdicts_to_csv(verdicts), "mask.pgm": mask_to_pgm(mask)}
        message = f"flagged {int(mask.sum())} of {mask.size} raypaths"
        if args.labels:
            labels = mask_from_pgm(read_text(args.labels))
            evaluation = evaluate_monitor(verdicts, labels)
            outputs["evaluation.json"] = dumps_json(evaluation)
            self.show(evaluation)
            message += f", precision {evaluation['precision']:.4f}, recall {evaluation['recall']:.4f}"
        return CommandResult(True, message, outputs, "verdicts.csv")
