"""Command-line surface: golden help texts, the JSON summary contract,
exit codes, and the pipe-friendly CSV flows."""

import contextlib
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np
import pytest

from liouville.cli import run
from liouville.fields import ScalarField2D

DATA = Path(__file__).parent / "data"

HELP_NAMES = [
    "top", "exact_h", "exact_e", "blowup_exact", "blowup_curve", "verify",
    "solve_elliptic", "gelfand", "blowup_approx", "march", "backlund",
    "action", "convert_log",
]


def invoke(args, stdin_text=None):
    out, err = io.StringIO(), io.StringIO()
    old_stdin = sys.stdin
    if stdin_text is not None:
        sys.stdin = io.StringIO(stdin_text)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = run(args)
    finally:
        sys.stdin = old_stdin
    return code, out.getvalue(), err.getvalue()


def summary_of(stdout):
    return json.loads(stdout.rstrip("\n").rsplit("\n", 1)[-1])


class TestHelpGoldens:
    @pytest.mark.parametrize("name", HELP_NAMES)
    def test_help_matches_golden(self, name):
        args = ["--help"] if name == "top" else [name.replace("_", "-"), "--help"]
        code, out, err = invoke(args)
        assert code == 0
        assert err == ""
        assert out == (DATA / f"help_{name}.txt").read_text()


class TestSummaryContract:
    ARGS = ["exact-h", "--f", "exp(x)", "--g", "exp(y)", "--nx", "17",
            "--ny", "17"]

    def test_reruns_are_byte_identical(self):
        first = invoke(self.ARGS)
        second = invoke(self.ARGS)
        assert first == second
        assert first[0] == 0

    def test_summary_shape(self):
        _, out, _ = invoke(self.ARGS)
        line = out.rstrip("\n").rsplit("\n", 1)[-1]
        doc = json.loads(line)
        assert doc["status"] == "ok"
        assert doc["command"] == "exact-h"
        assert re.fullmatch(r"[0-9a-f]{12}", doc["digest"])
        # canonical form: sorted keys, no NaN
        assert line == json.dumps(doc, sort_keys=True, allow_nan=False)

    def test_digest_tracks_inputs(self):
        d17 = summary_of(invoke(self.ARGS)[1])["digest"]
        d33 = summary_of(invoke(self.ARGS[:-1] + ["33"])[1])["digest"]
        assert d17 != d33

    def test_threads_do_not_change_output(self):
        base = invoke(self.ARGS)
        threaded = invoke(self.ARGS + ["--threads", "4"])
        # identical CSV body; the summary differs only in the digest,
        # which hashes all inputs including --threads
        assert base[1].rsplit("\n", 2)[0] == threaded[1].rsplit("\n", 2)[0]
        doc_b, doc_t = summary_of(base[1]), summary_of(threaded[1])
        doc_b.pop("digest")
        doc_t.pop("digest")
        assert doc_b == doc_t


class TestExitCodes:
    def test_missing_required_flag(self):
        code, out, err = invoke(["exact-h"])
        assert code == 1
        doc = summary_of(out)
        assert doc["status"] == "error"
        assert doc["command"] == "exact-h"
        assert doc["error"]["code"] == "cli.usage"
        assert err.startswith("error:")

    def test_singular_node_is_data_error(self):
        code, out, err = invoke(["exact-h", "--f", "x", "--g", "y",
                                 "--domain", "-1", "-1", "1", "1"])
        assert code == 1
        assert summary_of(out)["error"]["code"] == "closedform.singular_node"

    def test_nonconvergence_is_exit_two(self):
        code, out, _ = invoke(["solve-elliptic", "--geometry", "disk",
                               "--n", "257", "--K", "-2", "--out", "/dev/null"])
        assert code == 2
        assert summary_of(out)["error"]["code"] == "elliptic.non_convergence"

    def test_threads_must_be_positive(self):
        code, out, _ = invoke(["blowup-exact", "--threads", "0"])
        assert code == 1
        assert summary_of(out)["error"]["code"] == "cli.usage"

    def test_log_form_pins_a(self):
        code, out, _ = invoke(["verify", "--eq", "log", "--a", "2"],
                              stdin_text="")
        assert code == 1
        assert "a = 1" in summary_of(out)["error"]["message"]


class TestPipeFlows:
    EXACT = ["exact-h", "--f", "exp(x)", "--g", "exp(y)",
             "--domain", "1", "1", "2", "2", "--nx", "65", "--ny", "65"]

    def test_exact_then_verify(self):
        code, out, _ = invoke(self.EXACT)
        assert code == 0
        # the verifier reads exactly the field rows, so the trailing
        # summary line may stay in the stream
        code, vout, _ = invoke(["verify", "--eq", "hyperbolic"], stdin_text=out)
        assert code == 0
        doc = summary_of(vout)
        assert doc["eq"] == "hyperbolic"
        assert doc["max_abs"] <= 1e-3
        assert doc["cells"] == 64 * 64

    def test_convert_log_round(self):
        _, out, _ = invoke(self.EXACT)
        code, tout, _ = invoke(["convert-log", "--direction", "u-to-T"],
                               stdin_text=out)
        assert code == 0
        code, vout, _ = invoke(["verify", "--eq", "log"], stdin_text=tout)
        assert code == 0
        assert summary_of(vout)["max_abs"] <= 1e-3

    def test_action_on_piped_field(self):
        _, out, _ = invoke(self.EXACT)
        code, aout, _ = invoke(["action", "--fd-check", "10"], stdin_text=out)
        assert code == 0
        doc = summary_of(aout)
        assert doc["fd_rel_max"] <= 1e-6
        assert doc["value"] > 0


class TestFieldFiles:
    def test_round_trip_is_bitwise(self, tmp_path):
        path = tmp_path / "u.csv"
        code, out, _ = invoke(["exact-h", "--f", "x", "--g", "y",
                               "--nx", "17", "--ny", "9", "--out", str(path)])
        assert code == 0
        assert summary_of(out)["n_masked"] == 0
        back = ScalarField2D.read_csv(path)
        assert back.grid.nx == 17 and back.grid.ny == 9
        code, vout, _ = invoke(["verify", "--eq", "hyperbolic",
                                "--in", str(path)])
        assert code == 0
        assert summary_of(vout)["max_abs"] <= 1e-3

    def test_march_writes_mask(self, tmp_path):
        mask = tmp_path / "mask.csv"
        code, out, _ = invoke(["march", "--phi", "0", "--psi", "0",
                               "--domain", "0", "0", "3", "3",
                               "--nx", "33", "--ny", "33",
                               "--threshold", "1.0",
                               "--out", "/dev/null", "--mask-out", str(mask)])
        assert code == 0
        assert summary_of(out)["n_masked"] > 0
        lines = mask.read_text().splitlines()
        assert lines[0].startswith("# 33 33 ")
        assert len(lines) == 34
        assert set("".join(lines[1:]).replace(",", "")) == {"0", "1"}


class TestSolverCommands:
    def test_solve_elliptic_rectangle(self):
        code, out, _ = invoke(["solve-elliptic", "--nx", "33", "--ny", "33",
                               "--out", "/dev/null"])
        assert code == 0
        doc = summary_of(out)
        assert doc["report"]["converged"] is True
        # Lap u = e^u with zero boundary keeps the interior negative
        assert doc["u_min"] < 0 and doc["u_max"] == 0.0

    def test_gelfand_reports_fold(self):
        code, out, _ = invoke(["gelfand", "--n", "65", "--out", "/dev/null"])
        assert code == 0
        doc = summary_of(out)
        assert doc["aborted"] is False
        assert 1.99 <= doc["lambda0"] < 2.0
        assert abs(doc["u0_at_fold"] - math.log(4.0)) <= 1e-2
        assert doc["points"] > 10

    def test_backlund_default_domain(self):
        code, out, _ = invoke(["backlund", "--out", "/dev/null"])
        assert code == 0
        # u = -2 ln(1 - x - y/2) peaks at the (0.5, 0.5) corner
        assert summary_of(out)["u_max"] == pytest.approx(
            -2.0 * math.log(0.25), abs=1e-6)

    def test_blowup_approx_blocks_on_stdout(self):
        code, out, _ = invoke(["blowup-approx", "--n", "65", "--M", "3", "4.5"])
        assert code == 0
        body = out.rsplit("\n", 2)[0]
        blocks = body.split("\n\n")
        assert len(blocks) == 2
        assert all(b.startswith("r,u") for b in blocks)
        doc = summary_of(out)
        assert doc["gaps"][1] < doc["gaps"][0]

    def test_blowup_approx_needs_placeholder(self, tmp_path):
        code, out, _ = invoke(["blowup-approx", "--n", "65", "--M", "3", "4",
                               "--out", str(tmp_path / "prof.csv")])
        assert code == 1
        assert "{M}" in summary_of(out)["error"]["message"]

    def test_blowup_approx_placeholder_files(self, tmp_path):
        out_pat = tmp_path / "prof_{M}.csv"
        code, _, _ = invoke(["blowup-approx", "--n", "65", "--M", "3", "4",
                             "--out", str(out_pat)])
        assert code == 0
        assert (tmp_path / "prof_3.csv").exists()
        assert (tmp_path / "prof_4.csv").exists()

    def test_blowup_curve_csv(self):
        code, out, _ = invoke(["blowup-curve", "--f", "exp(x)", "--g=-2*y",
                               "--x-range", "0", "1", "--y-range", "0", "2",
                               "--samples", "11"])
        assert code == 0
        doc = summary_of(out)
        assert doc["n_found"] == 11
        first = out.splitlines()[0]
        assert first == "x,y"
