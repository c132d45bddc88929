from string_algebra_workbench import StringAlgebraWorkbench
from src.config import load_config
from src.errors import StringAlgebraError
from src.presentation import validate_string_algebra
import os
import json
import glob
from tqdm import tqdm


def validation_scheme(algebra_paths, validation_name, config=None):
    """Run the audit over every algebra and keep one error log per algebra under ``validation_name``."""
    os.makedirs(validation_name, exist_ok=True)
    workbench = StringAlgebraWorkbench(config or load_config())
    summary = {}

    for path in tqdm(algebra_paths):
        name = os.path.splitext(os.path.basename(path))[0]
        error_log = []
        try:
            A = workbench.load(path, validate=False)
            result = validate_string_algebra(A)
            if not result.ok:
                error_log.extend(v.message for v in result.violations)
                summary[name] = {"validated": False}
            else:
                report = workbench.audit(result.presentation)
                for suite in report.suites:
                    error_log.extend(f"{suite.name}: {failure}" for failure in suite.failures)
                with open(os.path.join(validation_name, name + "_audit.json"), "w") as f:
                    f.write(report.model_dump_json(indent=2))
                summary[name] = {
                    "validated": True,
                    "passed": report.passed,
                    "skipped": [suite.name for suite in report.suites if suite.skipped],
                }
        except StringAlgebraError as e:
            print(f'Audit failed for {name}:', e)
            error_log.append(str(e))
            summary[name] = {"error": str(e)}

        # save the error log
        with open(os.path.join(validation_name, name + "_error_log.txt"), "w") as f:
            for error in error_log:
                f.write(error + "\n")

    with open(os.path.join(validation_name, "summary.json"), "w") as f:
        json.dump(summary, f, indent=2)
    return summary


if __name__ == "__main__":
    corpus = sorted(glob.glob("corpus/*.alg"))
    results = validation_scheme(corpus, "results", load_config(word_bound=5, samples=100))
    for name, entry in results.items():
        print(name, entry)
