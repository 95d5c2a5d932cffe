import pytest

from pitchside import data
from pitchside.setplay import (
    CaseBase,
    ContextFeatures,
    NoCandidateError,
    WorldView,
    cbr_select,
    feasible_setplays,
    parse_setplay,
    record_outcome,
    score,
)
from pitchside.setplay.casebase import ALPHA, BETA, kernel


def ctx(ball=(0.0, 0.0), mode="corner", opp=5.0):
    return ContextFeatures(ball_pos=ball, play_mode=mode, nearest_opponent=opp)


def record_many(base, sid, outcomes, context):
    for i, success in enumerate(outcomes):
        base = record_outcome(base, sid, context, success, cycle=i)
    return base


class TestCaseBase:
    def test_append_to_empty(self):
        base = record_outcome(CaseBase(), 1, ctx(), True, cycle=5)
        assert len(base) == 1

    def test_appends_preserve_order_and_do_not_mutate(self):
        base0 = CaseBase()
        base1 = record_outcome(base0, 1, ctx(), True, cycle=1)
        base2 = record_outcome(base1, 2, ctx(), False, cycle=2)
        assert len(base0) == 0 and len(base1) == 1
        assert [c.setplay_id for c in base2.cases] == [1, 2]

    def test_kernel_is_one_at_same_context(self):
        assert kernel(ctx(), ctx()) == pytest.approx(1.0)

    def test_kernel_damps_mode_mismatch(self):
        assert kernel(ctx(mode="corner"), ctx(mode="free-kick")) == pytest.approx(0.1)


class TestSelect:
    def test_empty_base_prior_and_tie_break(self):
        base = CaseBase()
        context = ctx()
        assert score(base, 5, context) == pytest.approx(ALPHA / (ALPHA + BETA))
        assert cbr_select(base, [7, 3, 5], context) == 3  # tie -> lowest id

    def test_evidence_beats_prior_hand_computed(self):
        # A: 9 successes 1 failure at identical context (K = 1);
        # B: 1 success. Smoothed: A = (9+1)/(10+2), B = (1+1)/(1+2).
        context = ctx()
        base = record_many(CaseBase(), 1, [True] * 9 + [False], context)
        base = record_many(base, 2, [True], context)
        assert score(base, 1, context) == pytest.approx(10 / 12)
        assert score(base, 2, context) == pytest.approx(2 / 3)
        assert cbr_select(base, [1, 2], context) == 1

    def test_kernel_weight_prefers_nearby_evidence(self):
        # Identical histories (one success each), but A's case is at the
        # query context while B's is 30 m away (K ~ 0).
        query = ctx(ball=(10.0, 5.0))
        base = record_outcome(CaseBase(), 1, query, True, cycle=0)
        base = record_outcome(base, 2, ctx(ball=(-15.0, -10.0)), True, cycle=1)
        k_far = kernel(query, ctx(ball=(-15.0, -10.0)))
        assert k_far < 1e-6
        assert score(base, 1, query) > score(base, 2, query)
        assert cbr_select(base, [1, 2], query) == 1

    def test_success_monotonicity(self):
        context = ctx()
        base = record_many(CaseBase(), 1, [True, False, True], context)
        before = score(base, 1, context)
        after_success = score(record_outcome(base, 1, context, True, 10), 1, context)
        after_failure = score(record_outcome(base, 1, context, False, 10), 1, context)
        assert after_success > before
        assert after_failure < before

    def test_no_candidates_raises(self):
        with pytest.raises(NoCandidateError):
            cbr_select(CaseBase(), [], ctx())

    def test_deterministic(self):
        context = ctx()
        base = record_many(CaseBase(), 3, [True, True], context)
        assert all(cbr_select(base, [3, 4], context) == 3 for _ in range(10))


class TestFeasible:
    def library(self, *names):
        lib = {}
        for name in names:
            ast = parse_setplay(data.read_setplay(name))
            lib[ast.id] = ast
        return lib

    def corner_view(self, n_teammates=5):
        teammates = {f"L{i}": (13.0 - i, 8.0 - i) for i in range(1, n_teammates + 1)}
        return WorldView(
            cycle=0, play_mode="corner", team="L",
            ball_pos=(14.5, 9.5), ball_vel=(0.0, 0.0),
            teammates=teammates, opponents={}, ball_owner="L1",
        )

    def test_play_mode_gate(self):
        lib = self.library("corner-short")
        view = self.corner_view()
        view.play_mode = "play-on"
        assert feasible_setplays(lib, view) == []

    def test_binding_infeasible_with_two_teammates(self):
        lib = self.library("corner-short")  # needs 3 roles
        assert feasible_setplays(lib, self.corner_view(n_teammates=2)) == []

    def test_exactly_two_of_five_corpus_setplays_activate(self):
        # Hand evaluation at a corner: corner-short (2) and corner-far (9)
        # activate; kickoff (3), free-kick (4) and goal-kick (5) do not.
        lib = self.library("corner-short", "corner-far", "kickoff-spread",
                           "free-kick-forward", "goal-kick-buildup")
        assert feasible_setplays(lib, self.corner_view()) == [2, 9]
