"""Run a few registered checks and print the JSON report.

    python3 demos/verify_small.py
"""
import json

from iolog.verifier import reports_to_json, run_check, run_suite

reports = run_suite("example21", algebras=["DM4", "chain(3)", "O6"])
reports += [run_check("P-NP-ANTI", "B4"), run_check("P-NPL-6", "B8", count=500)]
# with SI dropped the engine has to come back with a counterexample
reports.append(run_check("P-NPL-6", "B4", drop_hypotheses=["SI"]))
print(json.dumps(reports_to_json(reports, timing=False), indent=1, ensure_ascii=False))
