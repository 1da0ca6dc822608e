"""Domain adaptation toolkit for phrase-based MT data pipelines.

Text cleanup, Kneser-Ney n-gram LMs with ARPA I/O, EM-interpolated
mixtures, cross-entropy difference data selection, BPE, operation
sequence encoding, exchange word clustering, OOV handling, corpus BLEU,
and a config-driven pipeline that ties them together.
"""

from .bpe import BpeModel, bpe_apply_line, bpe_learn, bpe_undo_line
from .classes import ClassMap, apply_classes, cluster_exchange
from .evaluation import BleuReport, bleu, progress_table
from .lm import NgramModel, evaluate, export_arpa, import_arpa, train_lm
from .mixture import MixtureModel, em_fit, merge_static
from .oov import TranslitTable, drop_oov, find_oov, transliterate_oov
from .osm import osm_decode, osm_encode
from .pipeline import PipelineConfig, run_pipeline
from .selection import score_corpus, select_fraction, train_scoring_lms
from .text import SentencePair, length_filter, normalize, tokenize

__version__ = "0.1.0"
