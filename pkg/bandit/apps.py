from django.apps import AppConfig


class BanditConfig(AppConfig):
    name = 'bandit'
