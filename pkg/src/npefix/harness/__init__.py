"""Evaluation harness: corpus, outcome matrices, seeding, overhead."""

from .campaign import CampaignResult, TestOutcome, load_inventory, run_seeding_campaign
from .corpus import Corpus, CorpusCase, check_case_integrity, load_manifest
from .matrix import OUTCOME_CODES, OutcomeMatrix, classify, run_matrix, strategy_cells
from .overhead import OverheadCase, OverheadReport, measure_overhead
from .reports import (
    campaign_to_json, campaign_to_text, matrix_to_json, matrix_to_record,
    matrix_to_text, overhead_row_text, overhead_to_json, overhead_to_record,
    overhead_to_text, write_report,
)
from .session import ExplorationSession, run_exploration_session

__all__ = [
    "OUTCOME_CODES", "CampaignResult", "Corpus", "CorpusCase",
    "ExplorationSession", "OutcomeMatrix", "OverheadCase", "OverheadReport",
    "TestOutcome", "campaign_to_json", "campaign_to_text",
    "check_case_integrity", "classify", "load_inventory", "load_manifest",
    "matrix_to_json", "matrix_to_record", "matrix_to_text", "measure_overhead",
    "overhead_row_text", "overhead_to_json", "overhead_to_record",
    "overhead_to_text", "run_matrix",
    "run_seeding_campaign", "run_exploration_session", "strategy_cells",
    "write_report",
]
