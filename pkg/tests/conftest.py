import os
import sys

import hypothesis as hyp

sys.path.insert(0, os.path.dirname(__file__))

hyp.settings.register_profile("default", max_examples=60, deadline=None)
hyp.settings.register_profile("ci", max_examples=200, deadline=None, derandomize=True)
hyp.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))
