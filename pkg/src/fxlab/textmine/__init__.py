from .lda import TopicModel, fit_lda_gibbs, select_topic_count, umass_coherence
from .lexicon import lexicon_scores
from .scores import SCORE_KEYS, TopicDayScores, TopicTrend, topic_day_scores, topic_trend
from .tokenize import TokenizedCorpus, load_stopwords, tokenize, tokenize_text

__all__ = [
    "SCORE_KEYS", "TokenizedCorpus", "TopicDayScores", "TopicModel", "TopicTrend",
    "fit_lda_gibbs", "lexicon_scores", "load_stopwords", "select_topic_count",
    "tokenize", "tokenize_text", "topic_day_scores", "topic_trend", "umass_coherence",
]
