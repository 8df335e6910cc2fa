"""Pairwise arena: judging, Bradley-Terry fitting, agreement, reporting."""

from unirule.arena.bt import (
    BTFit,
    WinMatrix,
    bt_gradient,
    bt_hessian,
    bt_nll,
    build_win_matrix,
    fit_bt,
    sandwich_se,
)
from unirule.arena.judging import (
    Candidate,
    PairwiseJudgment,
    derive_seed,
    enumerate_pairs,
    first_position_win_fraction,
    judge_pair,
    parse_verdict,
    read_judgments,
    write_judgments,
)
from unirule.arena.kappa import cohens_kappa
from unirule.arena.report import (
    ArenaReport,
    CellResult,
    PositionBiasWarning,
    csv_rows,
    scenario_report,
    write_report_csv,
)

__all__ = [
    "ArenaReport",
    "BTFit",
    "Candidate",
    "CellResult",
    "PairwiseJudgment",
    "PositionBiasWarning",
    "WinMatrix",
    "bt_gradient",
    "bt_hessian",
    "bt_nll",
    "build_win_matrix",
    "cohens_kappa",
    "csv_rows",
    "derive_seed",
    "enumerate_pairs",
    "first_position_win_fraction",
    "fit_bt",
    "judge_pair",
    "parse_verdict",
    "read_judgments",
    "sandwich_se",
    "scenario_report",
    "write_judgments",
    "write_report_csv",
]
