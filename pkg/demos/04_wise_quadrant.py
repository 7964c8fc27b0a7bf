"""
Wise's quadrant, period doubling, and why no regular labeling fits
===================================================================

Stacking tiles on y^n starting from the c-column produces the row words
M_n(m). They run through all 2^n words before repeating.
"""

from npcevents import labeling, wise

for m in range(8):
    print(m, wise.row_word(3, m))

pd = wise.period_doubling_check(12)
print("period doubling to 12:", pd.status)

# a broken tile set stops cycling at once
T = wise.wise_tileset()
swapped = dict(wise.mutations(T, "swap"))[("t3", "t4", "n")]
print("t3/t4 north colors swapped, first failure at n =", wise.first_failure(swapped, 6))

# in the subdivided cover with tips, each row carries its word as tip lengths
q = wise.QuadrantFragment(3, 7)
print("quadrant fragment:", q.frag.counts())
print("words from tips:", [q.word_from_tips(k) for k in range(8)])

lam = labeling.search_nice(q.frag, 5)
print("nice labeling with 4 symbols:", labeling.search_nice(q.frag, 4))
w = labeling.regular_obstruction_witness(q, lam, 2, 6, 3)
print("rows 2 and 6 read", w.words, "and part at column", w.index)
print("labeled filters match:",
      labeling.labeled_filter_iso(q.frag, lam, q.z(2, 0), q.z(6, 0), q.covering_depth(w.index)) is not None)
print("colour-only filters match:",
      labeling.labeled_filter_iso(q.frag, None, q.z(2, 0), q.z(6, 0), q.covering_depth(w.index)) is not None)
