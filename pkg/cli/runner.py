"""
Programmatic entry point: dispatch a RunConfig to its management command.
"""
import logging
import sys

from django.core.management import call_command
from django.core.management.base import CommandError

from .config import RunConfig

logger = logging.getLogger(__name__)


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """
    Run ``config.command`` and return its exit status: 0 when every
    validation passed, 1 for a failed validation, 2 for usage or input errors.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        config.validate()
        args, options = config.call_args()
        call_command(config.command, *args, stdout=stdout, stderr=stderr, **options)
    except CommandError as exc:
        stderr.write(f"{exc}\n")
        logger.debug(f"{config.command} exited with status {exc.returncode}")
        return exc.returncode
    return 0
