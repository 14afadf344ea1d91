from qhier_app.verify.suites import SUITES, run_suite
