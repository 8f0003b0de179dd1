from dataclasses import asdict

from raypath.core.frames import check_spec, write_frames, write_reflectance
from raypath.core.mixture import DEFAULT_MIN_GAP
from raypath.core.monitor import mask_to_pgm
from raypath.services.beamsim import (
    PRESETS,
    BeamSpec,
    benchmark_spec,
    load_scene,
    neighborhood_labels,
    preset,
    simulate_sequence,
)
from raypath.services.beamsim.beam import POLICIES
from raypath.shared.errors import InvalidArgumentError, UsageError
from raypath.utils.files import dumps_json

from .base import Command, CommandResult, parse_patch, require

BEAM_FLAGS = (
    ("rows", int),
    ("cols", int),
    ("elev_start", float),
    ("elev_step", float),
    ("az_start", float),
    ("az_step", float),
    ("half_angle", float),
    ("subrays", int),
    ("range_noise", float),
    ("rate_hz", float),
)


class SimulateCommand(Command):
    name = "simulate"
    help = "Simulate a frame sequence of a scene with the conical-beam model"

    @staticmethod
    def add_arguments(parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument("--preset", choices=sorted(PRESETS), help="Built-in scene")
        source.add_argument("--scene", help="Scene JSON file")
        parser.add_argument("--seed", type=int, help="Random seed (required)")
        parser.add_argument("--frames", type=int, default=1, help="Number of frames K (default 1)")
        parser.add_argument("--benchmark-grid", action="store_true", help="Start from the 40x64 benchmark pixel grid")
        parser.add_argument("--policy", choices=POLICIES, help="Detector policy (default strongest)")
        for flag, kind in BEAM_FLAGS:
            parser.add_argument(f"--{flag.replace('_', '-')}", type=kind, help=f"Beam {flag.replace('_', ' ')}")
        parser.add_argument(
            "--label-patch", help="Also write region_labels.pgm: neighborhood ground truth for this patch, e.g. 5x5"
        )
        parser.add_argument(
            "--label-separation", type=float, default=DEFAULT_MIN_GAP, help="Range gap (m) between distinct surfaces"
        )

    def _validate_params(self, args):
        require(args, "seed")
        if args.preset is None and args.scene is None:
            raise UsageError("give one of --preset or --scene")
        if args.seed < 0:
            raise UsageError(f"--seed must be >= 0, got {args.seed}")
        if args.frames < 1:
            raise UsageError(f"--frames must be >= 1, got {args.frames}")
        spec = self._beam_spec(args)
        if args.label_patch is not None:
            if not args.label_separation > 0:
                raise UsageError(f"--label-separation must be positive, got {args.label_separation}")
            try:
                check_spec((spec.rows, spec.cols), parse_patch(args.label_patch))
            except InvalidArgumentError as e:
                raise UsageError(str(e))

    def _beam_spec(self, args) -> BeamSpec:
        overrides = {flag: getattr(args, flag) for flag, _ in BEAM_FLAGS if getattr(args, flag) is not None}
        if args.policy is not None:
            overrides["policy"] = args.policy
        try:
            return benchmark_spec(**overrides) if args.benchmark_grid else BeamSpec.from_dict(overrides)
        except InvalidArgumentError as e:
            raise UsageError(str(e))

    def execute(self, args):
        scene = load_scene(args.scene) if args.scene else preset(args.preset, seed=args.seed)
        spec = self._beam_spec(args)
        self.log_print.info(f"simulating {args.frames} frame(s) of {spec.rows}x{spec.cols} pixels")
        seq, labels = simulate_sequence(scene, spec, args.frames, args.seed)
        outputs = {
            "frames.rif": write_frames(seq),
            "reflectance.rif": write_reflectance(seq),
            "labels.pgm": mask_to_pgm(labels),
            "scene.json": dumps_json(scene.to_dict()),
            "beam.json": dumps_json(asdict(spec)),
        }
        if args.label_patch is not None:
            region = neighborhood_labels(scene, spec, parse_patch(args.label_patch), args.label_separation)
            outputs["region_labels.pgm"] = mask_to_pgm(region)
        message = f"{seq.count} frame(s), {int(labels.sum())} multi-surface pixels"
        return CommandResult(True, message, outputs, "frames.rif")
