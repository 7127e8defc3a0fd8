from django.apps import AppConfig


class BncConfig(AppConfig):
    name = 'bnc'
