import specforge.global_config as gc
from specforge.assessment.parser import parse_completeness_response, parse_dor_response
from specforge.assessment.records import CompletenessAssessment, DorAssessment
from specforge.prompting.prompts import REASK_PROMPT, build_assessment_prompt
from specforge.specification.validator import validate_structure
from specforge.utilities.errors import ParseError
from specforge.utilities.io.logger import MyLogger
from specforge.utilities.timestamps import utc_timestamp

assessor_loc = 'assessor'


def _ask(gateway, ctx, prompt, parse):
    """Sends prompt and parses the reply, re-asking once in the same context if unreadable."""
    reply = gateway.send(ctx, prompt)
    try:
        return parse(reply)
    except ParseError as e:
        MyLogger.print_and_log('Unreadable answer in {} ({}), asking again'.format(ctx.context_id, e),
                               assessor_loc, level=1)
    return parse(gateway.send(ctx, REASK_PROMPT))


def assess_completeness(gateway, ctx, doc, template, version, document_id=None):
    document_id = document_id or doc.doc_id
    prompt = build_assessment_prompt(gc.completeness, doc, template, None, version)
    verdict, missing = _ask(gateway, ctx, prompt, parse_completeness_response)
    report = validate_structure(doc, template)
    record = CompletenessAssessment.build(document_id, verdict, missing, report, ctx.setting)
    if not record.agreement:
        MyLogger.print_and_log('Completeness of {} needs review: judge says {}, structure says {}'.format(
            document_id, record.llm_verdict, record.structural_verdict), assessor_loc, level=1)
    return record


def assess_dor(gateway, ctx, doc, template, scale, version, persona=None, document_id=None, clock=None):
    """Runs the DoR prompt in ctx and returns the assessment with its recomputed score."""
    document_id = document_id or doc.doc_id
    prompt = build_assessment_prompt(gc.dor, doc, template, scale, version, persona=persona)
    findings, reported = _ask(gateway, ctx, prompt, lambda raw: parse_dor_response(raw, scale))
    record = DorAssessment.build(document_id, findings, reported, ctx.setting, (clock or utc_timestamp)())
    if record.discrepancy:
        MyLogger.print_and_log('DoR of {} reported as {:.2f} but findings give {:.2f}'.format(
            document_id, record.reported_score, record.recomputed_score), assessor_loc, level=1)
    return record


def assess_document(gateway, ctx, doc, template, scale, versions, persona=None, persist=None, clock=None):
    """Completeness then DoR assessment of doc, both in ctx.

    Args:
        gateway (ChatGateway): Gateway owning ctx.
        ctx (ChatContext): Conversation to assess in, the generating one in
            same-context mode.
        doc (SsyrsDocument): Parsed document.
        template (Template): Template doc was parsed against.
        scale (SeverityScale): Deductions per severity level.
        versions (dict): PromptVersion per kind; completeness and dor are used.
        persona (PersonaConfig, optional): Persona of the DoR prompt.
        persist (callable, optional): Called with both records once they exist.
        clock (callable, optional): Timestamp source.

    Returns:
        (CompletenessAssessment, DorAssessment)
    """
    completeness = assess_completeness(gateway, ctx, doc, template, versions[gc.completeness])
    dor = assess_dor(gateway, ctx, doc, template, scale, versions[gc.dor], persona=persona, clock=clock)
    if persist is not None:
        persist(completeness, dor)
    return completeness, dor
