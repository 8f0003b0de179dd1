import sys
from datetime import datetime

from colorama import Fore


class LogPrint:
    """
    This class handles console message writing and formating.

    Messages go to stderr so stdout carries only machine-readable results.
    """

    def __init__(self, use_colors=True, stream=None, with_time=True):
        self.use_colors = use_colors
        self.stream = stream
        self.with_time = with_time

    @staticmethod
    def red(msg):
        return Fore.RED + msg + Fore.RESET

    @staticmethod
    def yellow(msg):
        return Fore.YELLOW + msg + Fore.RESET

    @staticmethod
    def green(msg):
        return Fore.GREEN + msg + Fore.RESET

    @staticmethod
    def blue(msg):
        return Fore.BLUE + msg + Fore.RESET

    def _write(self, msg):
        print(msg, file=self.stream or sys.stderr)

    def info(self, msg, with_time=None):
        with_time = self.with_time if with_time is None else with_time
        if with_time:
            current_time = datetime.now().strftime('%H:%M:%S.%f')[:-5]
            self._write(f"[{current_time}] {msg}")
        else:
            self._write(msg)

    def warning(self, msg):
        msg = self.yellow(msg) if self.use_colors else msg
        self._write(msg)

    def error(self, msg, should_exit=False):
        msg = self.red(msg) if self.use_colors else msg
        self._write(msg)
        if should_exit:
            raise SystemExit(1)

    def success(self, msg):
        msg = self.green(msg) if self.use_colors else msg
        self._write(msg)

    def header(self, header):
        header = self.green(header) if self.use_colors else header
        self._write("{s:{c}^{n}}".format(s=header, n=40, c="-"))
