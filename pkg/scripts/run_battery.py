"""Run the simple and product batteries over several seeds and save a JSON summary."""

import argparse
import io
import json
from pathlib import Path

from ckfields.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, nargs="+", default=list(range(1, 11)))
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--out", type=Path, default=Path("results/battery.json"))
    args = parser.parse_args()

    runs = {}
    for seed in args.seeds:
        buf = io.StringIO()
        code = cli_main(["battery", "all", "--seed", str(seed), "--samples", str(args.samples),
                         "--format", "json"], out=buf)
        result = json.loads(buf.getvalue())
        runs[seed] = result
        failed = [r["id"] for r in result["simple"] + result["products"] if not r["pass"]]
        print(f"seed {seed:3d}: exit {code}  failed: {', '.join(failed) or 'none'}")

    worst = {}
    for result in runs.values():
        for r in result["simple"]:
            key = f"{r['id']} {tuple(r['params'])}"
            d = r["defect"] if r["defect"] is not None else float("nan")
            worst[key] = max(worst.get(key, d), d)
    print("\nlargest defect per entry over all seeds")
    for key, d in worst.items():
        print(f"  {key:40s} {d:.3e}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps({"runs": runs, "worst_defect": worst}, indent=2))


if __name__ == "__main__":
    main()
