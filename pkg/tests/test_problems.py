import pytest

from horpo.problems import (
    ProblemError,
    check_problem,
    dump_json,
    parse_problem,
    print_problem,
    report_to_jsonable,
    report_to_text,
)
from horpo.terms import App, Arrow, Data, Var


def test_parse_brouwer(brouwer):
    assert len(brouwer.rules) == 3
    assert len(brouwer.sig.funs) == 4
    assert brouwer.statuses["rec"] == "mul"
    assert brouwer.vars["F"] == Arrow(Data("Nat"), Data("Ord"))


def test_empty_problem():
    p = parse_problem("")
    assert p.rules == []
    report = check_problem(p)
    assert report.ok


def test_nary_application_desugars():
    p = parse_problem(
        "sort N ;\n"
        "fun z : [] -> N ;\n"
        "var F : N -> N -> N ;\n"
        "var x : N ;\n"
        "rule z -> z ;\n"
    )
    # reuse the parser on a term through a rule
    q = parse_problem(
        "sort N ;\nfun z : [] -> N ;\nvar F : N -> N -> N ;\nvar x : N ;\n"
        "rule @(F, x, x) -> x ;\n"
    )
    lhs = q.rules[0].lhs
    assert isinstance(lhs, App) and isinstance(lhs.fn, App)
    assert lhs.fn.fn == Var("F", Arrow(Data("N"), Arrow(Data("N"), Data("N"))))
    del p


def test_lambda_glyph_accepted():
    p = parse_problem(
        "sort N ;\nfun z : [] -> N ;\nvar F : N -> N ;\n"
        "rule λx:N. @(F, x) -> F ;\n"
    )
    q = parse_problem(
        "sort N ;\nfun z : [] -> N ;\nvar F : N -> N ;\n"
        "rule \\x:N. @(F, x) -> F ;\n"
    )
    from horpo.terms import alpha_eq

    assert alpha_eq(p.rules[0].lhs, q.rules[0].lhs)


def test_free_variable_violation():
    with pytest.raises(ProblemError, match=r"Var\(r\) <= Var\(l\)"):
        parse_problem(
            "sort N ;\nfun f : [N] -> N ;\nvar X : N ;\nvar Y : N ;\n"
            "rule f(X) -> Y ;\n"
        )


def test_rule_type_mismatch():
    with pytest.raises(ProblemError, match="different types"):
        parse_problem(
            "sort N ;\nsort M ;\nfun f : [] -> N ;\nfun g : [] -> M ;\n"
            "rule f -> g ;\n"
        )


def test_positioned_syntax_error():
    with pytest.raises(ProblemError, match="line 2"):
        parse_problem("sort N ;\nfun f : N ;\n")


def test_unknown_symbol_in_rule():
    with pytest.raises(ProblemError, match="unknown function symbol"):
        parse_problem("sort N ;\nvar X : N ;\nrule g(X) -> X ;\n")


def test_app_precedence_rules():
    base = "sort N ;\nfun f : [N] -> N ;\nvar X : N ;\n"
    # redundant but accepted
    parse_problem(base + "prec f > @ ;\n")
    with pytest.raises(ProblemError):
        parse_problem(base + "prec f = @ ;\n")


def test_equivalent_symbols_must_share_arity():
    with pytest.raises(ProblemError, match="arities"):
        parse_problem(
            "sort N ;\nfun f : [N] -> N ;\nfun g : [] -> N ;\nprec f = g ;\n"
        )


def test_equivalent_symbols_must_share_status():
    with pytest.raises(ProblemError, match="statuses"):
        parse_problem(
            "sort N ;\nfun f : [N,N] -> N ;\nfun g : [N,N] -> N ;\n"
            "prec f = g ;\nstatus f mul ;\nstatus g lex ;\n"
        )


def test_precedence_cycle_rejected():
    with pytest.raises(ProblemError, match="cycle"):
        parse_problem(
            "sort N ;\nfun f : [] -> N ;\nfun g : [] -> N ;\n"
            "prec f > g ;\nprec g > f ;\n"
        )


def test_duplicate_function():
    with pytest.raises(ProblemError, match="duplicate"):
        parse_problem("sort N ;\nfun f : [] -> N ;\nfun f : [] -> N ;\n")


def test_round_trip(brouwer, nat_rec, map_problem):
    for p in (brouwer, nat_rec, map_problem):
        text = print_problem(p)
        again = parse_problem(text)
        assert print_problem(again) == text


def test_report_serialization_deterministic(brouwer):
    r1 = check_problem(brouwer)
    r2 = check_problem(brouwer)
    j1 = dump_json(report_to_jsonable(brouwer, r1, with_traces=True))
    j2 = dump_json(report_to_jsonable(brouwer, r2, with_traces=True))
    assert j1 == j2
    assert report_to_text(brouwer, r1, False) == report_to_text(brouwer, r2, False)
    # timing never leaks into serialized output
    assert "elapsed" not in j1 and "time" not in j1


def test_report_overall_status(brouwer):
    report = check_problem(brouwer)
    assert report.ok
    assert all(r.verdict == "oriented" for r in report.rule_results)
