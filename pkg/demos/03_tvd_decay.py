"""Truncation error against the cutoff over random circuits.

Writes ``decay.csv`` next to the working directory.
"""
# %% run the experiment
from noisybs.io import write_table
from noisybs.validation import decay_experiment

table = decay_experiment(n=3, m=60, x=0.5, delta=0.1, draws=50, seed=0)

# %% report
print(f"{'l':>2} {'bound':>8} {'median':>10} {'max':>10} {'pass':>6}")
for row in table["rows"]:
    print(f"{row['l']:>2} {row['bound']:8.3f} {row['median_delta']:10.2e} "
          f"{row['max_delta']:10.2e} {row['pass_fraction']:6.2f}")
print("median non-increasing:", table["monotone_median"])
write_table("decay.csv", table["rows"])
