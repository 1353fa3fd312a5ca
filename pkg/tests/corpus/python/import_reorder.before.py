import os
import sys
import json

value = json.loads(os.environ["CONF"])
