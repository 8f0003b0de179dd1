from .base import Command, CommandResult
from .cdf import TcdfCommand, ScdfCommand, CompareCommand
from .mocomp import MocompCommand
from .fit_gmm import FitGmmCommand
from .monitor import MonitorCommand
from .simulate import SimulateCommand
from .reg_experiment import RegExperimentCommand
from .convert import ConvertCommand

COMMANDS = [
    TcdfCommand,
    ScdfCommand,
    MocompCommand,
    CompareCommand,
    FitGmmCommand,
    MonitorCommand,
    SimulateCommand,
    RegExperimentCommand,
    ConvertCommand,
]

__all__ = ['Command', 'CommandResult', 'COMMANDS']
