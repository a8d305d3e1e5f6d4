"""
Replaying a week of geo-tagged tweets
=====================================

Generate a synthetic week, classify every tweet inside the Indonesia
bounding box, aggregate predicted hits on a half-degree grid and by day,
and draw a 100 + 100 audit sample.
"""

from tweetsurv import corpus, pipeline, synth, textpipe
from tweetsurv._rng import make_rng
from tweetsurv.geostream import GridSpec, StreamAggregator, grid_rows, replay

# %%
# A classifier from the bundled labeled corpus.
labeled = corpus.drop_retweets(corpus.dedupe(synth.labeled_corpus()))
stopwords = textpipe.default_stopwords()
clf = pipeline.train(labeled, stopwords, seed=make_rng(2016, "split")).classifier

# %%
# 20,000 records, some outside the box and some without coordinates.
# About half a percent of in-box records mention an illness.
records, truth = synth.stream_week(n=20_000)
print("records", truth.n_records, "in bbox", truth.n_in_bbox, "planted TRUE", len(truth.true_ids))

# %%
# One pass keeps only aggregate state plus two reservoirs.
agg = StreamAggregator(GridSpec(cell_deg=0.5), audit=(20, 20), seed=make_rng(2016, "audit"))
agg.consume(replay(records, clf.tree, clf.vocab, stopwords))
print("hits", agg.n_hits, "predicted TRUE", agg.n_true, f"({100 * agg.n_true / agg.n_hits:.2f}%)")

# %%
for day, count in agg.daily().items():
    print(day, "#" * count)

# %%
# Busiest cells (lat_index, lon_index, centre, count).
for row in sorted(grid_rows(agg.grid_counts, agg.grid), key=lambda r: -r[-1])[:5]:
    print(row)

# %%
sample = agg.audit()
print(len(sample), "audit rows; first:", sample[0].tweet.text)
