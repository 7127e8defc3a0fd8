from django.apps import AppConfig


class SeparatorsConfig(AppConfig):
    name = 'separators'
