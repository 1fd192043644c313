import os

ROOT_DIR = os.path.dirname(os.path.abspath(__file__))
CONFIG_FILE = os.path.join(ROOT_DIR, 'config.yaml')
CONFIG_META_FILE = os.path.join(ROOT_DIR, 'configmeta.yaml')
DATA_DIR = os.path.join(ROOT_DIR, 'grammar_learner', 'data')
LOG_FILE = os.path.join(ROOT_DIR, 'debug.log')
