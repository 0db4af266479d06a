"""Shared helpers for driving the CLI in-process."""

from __future__ import annotations

import contextlib
import io

from qgame.cli import main


def run_cli(args: list[str]) -> tuple[int, str, str]:
    """Run the CLI entry point, returning (exit_code, stdout, stderr).

    argparse raises SystemExit on its own parse errors, so both return
    values and SystemExit codes are normalized to a plain int.
    """
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = main(args)
        except SystemExit as exc:  # argparse --help / usage errors
            code = exc.code if isinstance(exc.code, int) else 2
    return code, out.getvalue(), err.getvalue()
