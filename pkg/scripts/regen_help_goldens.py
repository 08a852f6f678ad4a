"""Regenerate the pinned --help texts under tests/data/.

Run after any flag change, then review the diff; the golden test fails
on any drift so help strings cannot rot silently.
"""

import io
import pathlib
import sys
from contextlib import redirect_stdout

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from liouville.cli import build_parser, run  # noqa: E402

DATA = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data"


def capture_help(argv) -> str:
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(argv)
    assert code == 0, f"--help exited {code} for {argv}"
    return buf.getvalue()


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    names = ["top"] + sorted(build_parser()._subparsers._group_actions[0]
                             .choices.keys())
    for name in names:
        argv = ["--help"] if name == "top" else [name, "--help"]
        path = DATA / f"help_{name.replace('-', '_')}.txt"
        path.write_text(capture_help(argv))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
