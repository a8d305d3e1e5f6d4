"""Health-event mining over Indonesian tweets.

Keyword-protocol filtering, text normalization, a CART relevance classifier,
accuracy and ROC evaluation, and geo-bounded stream replay with aggregation.
"""

from . import cart, corpus, geostream, metrics, pipeline, queryproto, synth, textpipe
from .cart import Dataset, FitParams, SplitRule, Tree, best_split, gini, grow, prune, train_valid_split
from .corpus import LabeledTweet, TweetRecord, dedupe, drop_retweets, filter_lang, load_corpus
from .geostream import BBox, GridSpec, INDONESIA, aggregate_grid, audit_sample, daily_series, in_bbox, replay
from .metrics import ConfusionMatrix, auc, confusion, rates, roc
from .queryproto import Query, Term, default_protocol, matches, parse_query, render
from .textpipe import build_vocab, normalize, remove_stopwords, term_correlation, tokenize, top_associations, vectorize

__version__ = "0.1.0"
