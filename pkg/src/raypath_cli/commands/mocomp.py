from raypath.core.ecdf import cdf_to_csv
from raypath.core.mocomp import match_trace, trace_cdf, trace_to_csv

from .base import Command, CommandResult, add_input_arguments, check_ray, load_sequence, parse_patch, parse_ray, require
from .cdf import add_match_arguments, validate_match
from ..table import dicts_to_pt


class MocompCommand(Command):
    name = "mocomp"
    help = "Per-frame patch-match trace of a raypath and its compensated temporal CDF"

    @staticmethod
    def add_arguments(parser):
        add_input_arguments(parser)
        parser.add_argument("--ray", help="Anchor raypath as i,j")
        add_match_arguments(parser)

    def _validate_params(self, args):
        require(args, "input", "ray")
        parse_ray(args.ray)
        validate_match(args)

    def execute(self, args):
        seq = load_sequence(args)
        ray = parse_ray(args.ray)
        check_ray(seq, ray)
        trace = match_trace(seq, ray, args.radius, parse_patch(args.patch), args.min_pairs)
        cdf = trace_cdf(seq, ray, trace)
        shifted = [m for m in trace if m.dp or m.dq]
        if shifted:
            rows = [{"k": m.k, "dp": m.dp, "dq": m.dq, "J": m.cost, "pairs": m.valid_pairs} for m in shifted]
            self.log_print.info("\n" + dicts_to_pt(rows, numbered=False).get_string(), with_time=False)
        outputs = {"trace.csv": trace_to_csv(trace), "compensated.csv": cdf_to_csv(cdf)}
        message = f"matched {len(trace)} of {seq.count} frames, {len(shifted)} shifted"
        return CommandResult(True, message, outputs, "trace.csv")
