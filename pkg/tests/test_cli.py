import json

import pytest

from cli import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.strip(), captured.err.strip()


class TestAlgebraCommands:
    def test_normal_order(self, capsys):
        assert run(capsys, "normal-order", "b*bd") == (0, "q^2*bd*b + eta2", "")

    def test_print_with_alphabet(self, capsys):
        code, out, _ = run(capsys, "print", "eta2", "--alphabet", "plane")
        assert (code, out) == (0, "eta2")

    def test_commutators(self, capsys):
        assert run(capsys, "comm", "b", "bd")[1] == "(-1 + q^2)*bd*b + eta2"
        assert run(capsys, "qcomm", "b", "bd")[1] == "eta2"

    def test_q_poisson(self, capsys):
        assert run(capsys, "qpoisson", "z", "zb")[1] == "i"

    def test_symbol_and_star(self, capsys):
        assert run(capsys, "symbol", "b*bd")[1] == "q^2*zb*z + eta2"
        assert run(capsys, "star", "z", "zb")[1] == "q^2*zb*z + eta2"
        assert run(capsys, "star", "b", "bd", "--order", "0")[1] == "q^2*zb*z"

    def test_integrate(self, capsys):
        assert run(capsys, "integrate", "zb*z")[1] == "q^-2"
        assert run(capsys, "integrate", "zb*z", "--variant", "commutative")[1] == "1"

    def test_kernel(self, capsys):
        code, out, _ = run(capsys, "kernel", "b")
        assert code == 0
        assert "exp_inv_q2" in out

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "--output", "json", "comm", "b", "bd")
        payload = json.loads(out)
        assert code == 0
        assert payload["command"] == "comm"
        assert payload["result"] == "(-1 + q^2)*bd*b + eta2"
        assert payload["params"] == {"left": "b", "right": "bd"}


class TestErrors:
    def test_unknown_identifier(self, capsys):
        code, out, err = run(capsys, "normal-order", "b*x")
        assert code == 1
        assert out == ""
        assert err.startswith("error:")

    def test_mixed_alphabets(self, capsys):
        assert run(capsys, "comm", "b", "z")[0] == 1

    def test_qcomm_of_sum(self, capsys):
        assert run(capsys, "qcomm", "b + bd", "b")[0] == 1

    def test_bad_gamma(self, capsys):
        assert run(capsys, "poisson", "z", "zb", "--gamma", "abc")[0] == 1

    def test_zero_denominator(self, capsys):
        code, out, err = run(capsys, "normal-order", "1/0*b")
        assert (code, out) == (1, "")
        assert "zero denominator" in err

    def test_kernel_order_below_degree(self, capsys):
        code, out, err = run(capsys, "kernel", "b^3", "--order", "2")
        assert (code, out) == (1, "")
        assert err.startswith("error:")

    def test_usage_error(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2
        assert run(capsys, "--log-level", "loud", "verify")[0] == 2


class TestNumericCommands:
    def test_spectrum(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--dim", "4")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "n\teigenvalue\tclosed_form"
        assert len(lines) == 1 + 4 + 2
        assert lines[-1] == "ok"

    def test_evolve_reports_both_residuals(self, capsys):
        code, out, _ = run(capsys, "--output", "json", "evolve", "--dim", "8", "--t", "1.0", "--operator", "b")
        rows = json.loads(out)["result"]
        assert code == 0
        assert len(rows) == 1
        assert rows[0]["absolute_residual"] >= rows[0]["residual"]

    def test_failing_tolerance_exits_one(self, capsys):
        code, out, _ = run(capsys, "bch-check", "--dim", "20", "--block", "20", "--tol", "1e-30")
        assert code == 1
        assert out.endswith("FAIL")

    def test_phi(self, capsys):
        code, out, _ = run(capsys, "--output", "json", "phi", "--q", "0.5", "--x", "0", "1")
        rows = json.loads(out)["result"]
        assert code == 0
        assert [row["x"] for row in rows] == [0.0, 1.0]
        assert rows[0]["phi"] == pytest.approx(0.25)

    def test_action_residual(self, capsys, tmp_path):
        path = tmp_path / "path.env"
        path.write_text("q=0.5\ngrid=0:10:100\nrho=1.3\n")
        code, out, _ = run(capsys, "action-residual", "--config", str(path))
        assert code == 0
        assert "max_residual" in out

    def test_verify_suite(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "qarith")
        assert code == 0
        assert out.splitlines()[-1] == "5 passed, 0 failed"


def test_parser_defaults():
    args = build_parser().parse_args(["evolve"])
    assert args.dim == 32
    assert args.q == 1.2
    assert args.t == [0.3, 1.7, 10.0]
    assert args.operator is None
