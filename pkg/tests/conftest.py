import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tweetsurv import corpus, pipeline, synth, textpipe
from tweetsurv.cart import FitParams
from tweetsurv._rng import make_rng

BUNDLED = Path(__file__).resolve().parents[1] / "src" / "tweetsurv" / "data" / "labeled_400.ndjson"


@pytest.fixture(scope="session")
def bundled_path():
    return BUNDLED


@pytest.fixture(scope="session")
def clean_labeled():
    lab = corpus.load_labeled_corpus(BUNDLED)
    return corpus.filter_lang(corpus.drop_retweets(corpus.dedupe(lab)), "id")


@pytest.fixture(scope="session")
def trained(clean_labeled):
    return pipeline.train(
        clean_labeled, textpipe.default_stopwords(), 10, FitParams(), 0.7, make_rng(2016, "split")
    )


@pytest.fixture(scope="session")
def week_stream():
    return synth.stream_week()


@pytest.fixture(scope="session")
def week_file(week_stream, tmp_path_factory):
    path = tmp_path_factory.mktemp("week") / "week.ndjson"
    corpus.dump_corpus(week_stream[0], path)
    return path
