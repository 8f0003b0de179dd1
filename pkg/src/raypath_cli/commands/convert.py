from raypath.core.frames import export_xyz, write_frames, write_reflectance

from .base import Command, CommandResult, add_input_arguments, check_frame, load_sequence, require

FORMATS = ("rif", "xyz")


class ConvertCommand(Command):
    name = "convert"
    help = "Rewrite a RIF document canonically (optionally a frame range) or export one frame as points"

    @staticmethod
    def add_arguments(parser):
        add_input_arguments(parser)
        parser.add_argument("--to", choices=FORMATS, default="rif", help="Output format (default rif)")
        parser.add_argument("--frame", type=int, default=0, help="Frame to export with --to xyz")

    def _validate_params(self, args):
        require(args, "input")

    def execute(self, args):
        seq = load_sequence(args)
        if args.to == "xyz":
            check_frame(seq, args.frame)
            outputs = {"points.csv": export_xyz(seq[args.frame])}
            return CommandResult(True, f"exported frame {args.frame}", outputs, "points.csv")
        outputs = {"frames.rif": write_frames(seq)}
        sidecar = write_reflectance(seq)
        if sidecar is not None:
            outputs["reflectance.rif"] = sidecar
        return CommandResult(True, f"wrote {seq.count} frame(s) of {seq.rows}x{seq.cols}", outputs, "frames.rif")
