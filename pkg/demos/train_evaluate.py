"""
Training a keyword tree
=======================

Clean the bundled labeled corpus, fit a pruned classification tree on
word counts and report validation accuracy.
"""

from importlib.resources import files

from tweetsurv import corpus, pipeline, textpipe
from tweetsurv._rng import make_rng
from tweetsurv.cart import FitParams
from tweetsurv.metrics import report_table

# %%
# The bundled file holds 400 records; ten are retweets.
path = files("tweetsurv") / "data" / "labeled_400.ndjson"
records = corpus.load_labeled_corpus(path)
clean = corpus.filter_lang(corpus.drop_retweets(corpus.dedupe(records)), "id")
print(len(records), "->", len(clean))

# %%
# Words seen at least 10 times become predictors.  The split seed is
# derived from a master seed and a stage name.
stopwords = textpipe.default_stopwords()
result = pipeline.train(clean, stopwords, min_freq=10, params=FitParams(), train_fraction=0.7,
                        seed=make_rng(2016, "split"))
print("train/valid:", result.n_train, result.n_valid)
print("predictors:", ", ".join(result.classifier.vocab.words))

# %%
# The pruned tree reads as a chain of word-presence questions.
print(result.classifier.tree.describe())

# %%
print(report_table({"Validation": result.report}))

# %%
# "sakit" alone reads as illness; next to "hati" it is heartbreak.
for text in ["sakit perut dari pagi", "sakit hati sama dia", "anak demam tinggi"]:
    print(result.classifier.predict_text(text, stopwords), text)
