"""Builders for deterministic scenario documents and mock chat scripts.

Scripts built here drive ``ScriptedChatProvider`` through the same
conversations a live run has: one context per domain-iteration labelled
``iteration-<N>/<domain>`` holding generation, completeness and DoR turns.
"""
import specforge.global_config as gc
from specforge.assessment.parser import render_completeness_response, render_dor_response
from specforge.assessment.records import Finding
from specforge.assessment.scale import default_scale
from specforge.gateway.mock import ScriptedChatProvider
from specforge.gateway.settings import ModelSetting
from specforge.pipeline.config import RunConfig
from specforge.pipeline.runner import Pipeline
from specforge.pipeline.store import RunStore, document_id, iteration_name
from specforge.similarity.embedding import HashEmbeddingProvider
from specforge.specification.template import default_template
from specforge.utilities.errors import PreconditionError
from specforge.utilities.timestamps import fixed_clock

DEFAULT_SCORES = (0.9, 0.85, 0.8)

SETTINGS = (
    ('gpt-4o-same-context', 'gpt-4o', gc.same_context),
    ('gpt-4o-new-context', 'gpt-4o', gc.new_context),
    ('gpt-5.2-instant', 'gpt-5.2-chat-latest', gc.new_context),
    ('gpt-5.2-thinking', 'gpt-5.2', gc.new_context),
    ('sonnet-4.5', 'claude-sonnet-4-5', gc.new_context),
)


def scenario_text(domain, k, iteration=1, template=None):
    """Complete scenario document with every template section, deterministic in its arguments."""
    template = template or default_template()
    system = '{} Platform {}'.format(domain.name, k)
    lines = ['# {}'.format(system), '']
    for i, main in enumerate(template.main_categories, start=1):
        lines += ['## {}. {}'.format(i, main.name), '']
        for sub in main.sub_categories:
            detail = ' '.join('{} item {}'.format(domain.abbreviation, j) for j in range(k + iteration))
            lines += ['### {}'.format(sub),
                      'The {} addresses {} for {} teams: {}.'.format(system, sub.lower(), domain.name.lower(), detail),
                      '']
    return '\n'.join(lines)


def findings_for_score(score, scale=None, template=None):
    """Fewest findings whose deductions bring a DoR score down to score.

    Raises:
        PreconditionError: if the scale's deductions cannot sum to 1 - score.
    """
    scale = scale or default_scale()
    sections = (template or default_template()).sections()
    target = int(round((1.0 - score) * 100))
    costs = [int(round(level.deduction * 100)) for level in scale.levels]
    best = {0: []}
    for total in range(1, target + 1):
        options = [best[total - c] + [i] for i, c in enumerate(costs) if c <= total and total - c in best]
        if options:
            best[total] = min(options, key=len)
    if target not in best:
        raise PreconditionError('No combination of deductions gives a score of {}'.format(score))
    levels = [scale.levels[i] for i in sorted(best[target], reverse=True)]
    return [Finding(sections[j % len(sections)], 'Scripted finding {}.'.format(j + 1), level.name, level.deduction)
            for j, level in enumerate(levels)]


def dor_reply(score, reported=None, scale=None):
    return render_dor_response(findings_for_score(score, scale), score if reported is None else reported)


def domain_replies(domain, docs_per_domain=gc.DOCS_PER_DOMAIN, iteration=1, scores=DEFAULT_SCORES):
    """Replies of a same-context domain conversation: document, completeness and DoR per document."""
    replies = []
    for k in range(1, docs_per_domain + 1):
        replies += [scenario_text(domain, k, iteration), render_completeness_response(True),
                    dor_reply(scores[(k - 1) % len(scores)])]
    return replies


def protocol_script(domains, docs_per_domain=gc.DOCS_PER_DOMAIN, iterations=(1,), scores=DEFAULT_SCORES,
                    context_mode=gc.same_context):
    """Script answering every conversation of the given iterations.

    With new_context the domain conversation only generates and every
    document is judged in its own context labelled with the document id.
    """
    contexts = {}
    for n in iterations:
        for domain in domains:
            label = '{}/{}'.format(iteration_name(n), domain.abbreviation)
            replies = domain_replies(domain, docs_per_domain, n, scores)
            if context_mode == gc.same_context:
                contexts[label] = replies
                continue
            contexts[label] = replies[0::3]
            for k in range(1, docs_per_domain + 1):
                contexts[document_id(n, domain.abbreviation, k)] = replies[3 * k - 2:3 * k]
    return {'contexts': contexts}


def reliability_script(doc_id, scores):
    return {'contexts': {'reliability/{}/run-{}'.format(doc_id, i): [dor_reply(score)]
                         for i, score in enumerate(scores, start=1)}}


def validation_script(setting_id, doc_ids, score):
    return {'contexts': {'validation/{}/{}'.format(setting_id, doc_id): [dor_reply(score)] for doc_id in doc_ids}}


def mock_settings(max_retries=2):
    return tuple(ModelSetting(setting_id, 'http://localhost/v1/chat/completions', model, context_mode=mode,
                              max_retries=max_retries, backoff_base=0.0)
                 for setting_id, model, mode in SETTINGS)


def mock_config(run_id='mock', domains=(), docs_per_domain=gc.DOCS_PER_DOMAIN, generation_setting=SETTINGS[0][0],
                **changes):
    return RunConfig(run_id=run_id, domains=tuple(domains), docs_per_domain=docs_per_domain,
                     settings=mock_settings(), generation_setting=generation_setting,
                     embedding={'provider': 'mock', 'dimension': gc.MOCK_EMBEDDING['dimension']}, **changes)


def mock_pipeline(root, config, script=None, provider=None):
    """Pipeline over deterministic providers with a fixed clock and no retry delays."""
    provider = provider or ScriptedChatProvider.from_dict(script or {})
    return Pipeline(config, RunStore(root, config.run_id), provider, HashEmbeddingProvider(),
                    clock=fixed_clock(), sleep=lambda seconds: None)
