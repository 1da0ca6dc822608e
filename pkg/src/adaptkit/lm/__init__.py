from .arpa import ArpaError, export_arpa, format_arpa, import_arpa, parse_arpa
from .counts import DEFAULT_ORDER, NgramCounts, count_ngrams
from .kneser_ney import Discounts, estimate_kn, modified_discounts, train_lm
from .model import NgramModel, PerplexityResult, evaluate, iter_events, perplexity
from .vocab import BOS, EOS, UNK, Vocabulary

__all__ = [
    "ArpaError", "BOS", "DEFAULT_ORDER", "Discounts", "EOS", "NgramCounts", "NgramModel",
    "PerplexityResult", "UNK", "Vocabulary", "count_ngrams", "estimate_kn", "evaluate",
    "export_arpa", "format_arpa", "import_arpa", "iter_events", "modified_discounts",
    "parse_arpa", "perplexity", "train_lm",
]
