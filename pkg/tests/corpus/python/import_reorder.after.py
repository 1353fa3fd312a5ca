import json
import os
import sys

value = json.loads(os.environ["CONF"])
