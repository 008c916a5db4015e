"""Negation polarity reversal and NSPP/NSP pre-training corpus construction."""

__version__ = "0.1.0"

from .conllu import ParsedSentence, Token, detokenize, parse_conllu, parse_conllu_file
from .cues import (CueKind, CueLexicon, EligibilityVerdict, NegationCue,
                   RejectReason, detect_cues, eligibility, main_verb)
from .morphology import (expand_contraction, negate_aux, past_tense,
                         third_person_singular)
from .reversal import (CuePolicy, Direction, Edit, EditKind, RejectionKind,
                       ReversalOutcome, ReversalRejected, add_negation,
                       apply_edits, remove_negation, reverse_polarity,
                       select_auxiliary)
from .builder import (BuildConfig, ConfigError, PairRecord, build_corpus,
                      emit_datasets, extract_candidates, validate_output)
from .metrics import (group_consistency, macro_f1, mean_top1_error,
                      precision_at_1)
