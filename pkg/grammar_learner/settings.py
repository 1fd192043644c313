import copy
import logging.config
import threading

import yaml

# Keys in the meta file that describe a setting rather than nest further settings
META_LABEL = '__label'
META_HELPTEXT = '__helptext'


class Config:
    """
    Application settings. A singleton loaded once from config.yaml, with labels and help text for each setting loaded
    from configmeta.yaml. Settings are addressed by dotted keys, e.g. 'parser.max_edges'.
    """

    __instance = None
    __lock = threading.Lock()

    def __new__(cls):
        with cls.__lock:
            if cls.__instance is None:
                instance = super().__new__(cls)
                instance.__settings = {}
                instance.__meta = {}
                instance.__filename = None
                cls.__instance = instance
        return cls.__instance

    @property
    def loaded(self):
        """
        :return: True if settings have been loaded from a file.
        """
        return self.__filename is not None

    def load(self, filename, meta=None):
        """
        Loads the settings, replacing any already loaded.
        :param filename: The yaml settings file.
        :param meta: Optional yaml file containing a label and help text for each setting.
        :return:
        """
        with open(filename, 'r', encoding='utf-8') as file:
            self.__settings = yaml.safe_load(file) or {}

        self.__meta = {}
        if meta is not None:
            with open(meta, 'r', encoding='utf-8') as file:
                self.__meta = yaml.safe_load(file) or {}

        self.__filename = filename

    def get(self, key, default=None):
        """
        Gets a setting.
        :param key: Dotted path to the setting.
        :param default: Returned when the setting does not exist.
        :return: A copy of the setting value. Sections are returned as dicts.
        """
        node = self.__find(self.__settings, key)
        return default if node is None else copy.deepcopy(node)

    def set(self, key, value):
        """
        Sets a setting, creating any sections on the way.
        :param key: Dotted path to the setting.
        :param value:
        :return:
        """
        parts = key.split('.')
        node = self.__settings
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value

    def label(self, key):
        """
        :param key: Dotted path to the setting.
        :return: The label for the setting from the meta file, or the last part of the key.
        """
        meta = self.__find(self.__meta, key)
        if isinstance(meta, dict) and META_LABEL in meta:
            return meta[META_LABEL]
        return key.split('.')[-1]

    def help(self, key):
        """
        :param key: Dotted path to the setting.
        :return: The help text for the setting from the meta file, or None.
        """
        meta = self.__find(self.__meta, key)
        if isinstance(meta, dict):
            return meta.get(META_HELPTEXT)
        return None

    @staticmethod
    def __find(root, key):
        node = root
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return None
            node = node[part]
        return node


def configure_logging(log_file=None):
    """
    Configures logging from the 'logging' section of the settings.
    :param log_file: Optional file name to replace the file handler's file name.
    :return:
    """
    log_config = Config().get('logging')
    if log_config is None:
        logging.basicConfig(level=logging.INFO)
        return

    if log_file is not None and 'file' in log_config.get('handlers', {}):
        log_config['handlers']['file']['filename'] = log_file

    logging.config.dictConfig(log_config)
