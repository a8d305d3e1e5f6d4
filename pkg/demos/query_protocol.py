"""
Keyword protocol filtering
==========================

Parse the built-in health keyword protocol, inspect its clauses and run
a few tweets through it.
"""

from tweetsurv.queryproto import default_protocol, matches, parse_query, render

# %%
# The protocol is a disjunction of clauses.  Each clause is a conjunction
# of terms; a leading ``-`` negates a term and quotes make a substring match.
protocol = default_protocol()
for i, clause in enumerate(protocol.clauses, start=1):
    print(i, " ".join(("-" if t.negated else "") + (repr(t.text) if t.quoted else t.text) for t in clause))

# %%
# ``panas`` (hot) only counts when the tweet does not also mention
# ``cuaca`` (weather).
tweets = [
    "panas banget hari ini, badan lemas",
    "panas banget cuaca siang ini",
    "sedih :'(",
    "makan siang enak",
]
for text in tweets:
    print(f"{matches(protocol, text)!s:>5}  {text}")

# %%
# Queries render back to text that parses to the same structure.
q = parse_query('"rumah sakit" OR demam -cuaca')
print(render(q))
assert parse_query(render(q)) == q
