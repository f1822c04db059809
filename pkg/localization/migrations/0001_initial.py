import django.core.validators
import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='Network',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(blank=True, max_length=128, verbose_name='Название')),
                ('width', models.FloatField(validators=[django.core.validators.MinValueValidator(0.0)], verbose_name='Ширина области')),
                ('height', models.FloatField(validators=[django.core.validators.MinValueValidator(0.0)], verbose_name='Высота области')),
                ('node_count', models.PositiveIntegerField(validators=[django.core.validators.MinValueValidator(1)], verbose_name='Число узлов')),
                ('radius', models.FloatField(validators=[django.core.validators.MinValueValidator(0.0)], verbose_name='Радиус связи')),
                ('seed', models.PositiveBigIntegerField(default=0, verbose_name='Seed')),
                ('mean_connectivity', models.FloatField(default=0.0, verbose_name='Средняя связность')),
                ('positions', models.JSONField(default=list, verbose_name='Позиции узлов')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Создана')),
            ],
            options={
                'verbose_name': 'Сеть',
                'verbose_name_plural': 'Сети',
                'ordering': ('-created_at',),
            },
        ),
        migrations.CreateModel(
            name='SweepRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('status', models.CharField(choices=[('pending', 'В очереди'), ('running', 'Выполняется'), ('completed', 'Завершён'), ('failed', 'Ошибка')], default='pending', max_length=16, verbose_name='Статус')),
                ('error_model', models.CharField(choices=[('constant', 'Постоянная ошибка'), ('random', 'Случайная ошибка'), ('linear', 'Линейная ошибка'), ('logarithmic', 'Логарифмическая ошибка')], default='random', max_length=16, verbose_name='Модель ошибки')),
                ('e_start', models.FloatField(default=0.0, verbose_name='Начальное e')),
                ('e_step', models.FloatField(default=0.001, verbose_name='Шаг e')),
                ('steps', models.PositiveIntegerField(default=200, verbose_name='Число шагов')),
                ('max_range', models.FloatField(blank=True, null=True, verbose_name='MaxRange')),
                ('max_retries', models.PositiveIntegerField(default=50, verbose_name='Повторы при пустом кластере')),
                ('seed', models.PositiveBigIntegerField(default=0, verbose_name='Seed')),
                ('methods', models.JSONField(default=list, verbose_name='Методы')),
                ('strict_pairs', models.BooleanField(default=False, verbose_name='Строгий метод 1')),
                ('error_message', models.TextField(blank=True, verbose_name='Ошибка')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Создан')),
                ('updated_at', models.DateTimeField(auto_now=True, verbose_name='Обновлён')),
                ('network', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='sweeps', to='localization.network', verbose_name='Сеть')),
            ],
            options={
                'verbose_name': 'Развёртка',
                'verbose_name_plural': 'Развёртки',
                'ordering': ('-created_at',),
            },
        ),
        migrations.CreateModel(
            name='SweepResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('e', models.FloatField(verbose_name='e')),
                ('method', models.CharField(choices=[('m1', 'Метод 1 (Favour Points)'), ('m2', 'Метод 2 (вложенность в окружности)'), ('m3', 'Метод 3 (строгие Favour Points)')], max_length=4, verbose_name='Метод')),
                ('total_error', models.FloatField(blank=True, null=True, verbose_name='Total Error')),
                ('total_error_pct_range', models.FloatField(blank=True, null=True, verbose_name='Total Error, %range')),
                ('localized_count', models.PositiveIntegerField(verbose_name='Локализовано узлов')),
                ('node_count', models.PositiveIntegerField(verbose_name='Всего узлов')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='records', to='localization.sweeprun', verbose_name='Развёртка')),
            ],
            options={
                'verbose_name': 'Результат шага',
                'verbose_name_plural': 'Результаты шагов',
                'ordering': ('run', 'e', 'method'),
                'constraints': [models.UniqueConstraint(fields=('run', 'e', 'method'), name='unique_run_e_method')],
            },
        ),
    ]
