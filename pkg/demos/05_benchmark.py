"""Run the benchmark harness on a small synthetic corpus.

The harness decomposes every image with every configuration, first tuning
one weight per image so all configurations reach the same
structure-to-texture ratio, then reports the structure/texture
correlations c0 and c1 (lower magnitude means cleaner separation).
The command line equivalent is

    semisparse benchmark --corpus DIR --config bench.ini --out-json report.json
"""
import sys
import tempfile
from pathlib import Path

from semisparse import write_image
from semisparse.benchmark import parse_settings, rows_to_csv, run_benchmark
from semisparse.synthetic import suite

CONFIG = """
[benchmark]
target_str = 19.23
tune = lam, alpha

[semi-sparse]
model = l1
lambda = 0.05
alpha = 0.002
beta = 0.002

[tv-l1]
model = l1
lambda = 0.05
alpha = 0.002
beta = 0
"""

with tempfile.TemporaryDirectory() as tmp:
    corpus = Path(tmp)
    for i, (f, _) in enumerate(suite(64, 4, seed=1)):
        write_image(corpus / f"img{i}.png", f)
    settings = parse_settings(CONFIG)
    rows, aggregates = run_benchmark(corpus, settings, threads=2, timing=False)

sys.stdout.write(rows_to_csv(rows))
print()
for name, agg in aggregates.items():
    print(name, {k: (round(v, 4) if isinstance(v, float) else v) for k, v in agg.items()})
