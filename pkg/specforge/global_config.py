import os


################################################################################
# Packaged data
################################################################################

data_path = os.path.join(os.path.dirname(__file__), 'data')

TEMPLATE_FILE = os.path.join(data_path, 'template.yaml')
DOMAINS_FILE = os.path.join(data_path, 'domains.yaml')
SEVERITY_SCALE_FILE = os.path.join(data_path, 'config', 'severity_scale.json')
RUN_CONFIG_FILE = os.path.join(data_path, 'config', 'run.yaml')
PROMPTS_PATH = os.path.join(data_path, 'prompts')
DOMAIN_PROPOSAL_PROMPT = os.path.join(PROMPTS_PATH, 'domain_proposal.txt')

runs_path = os.environ.get('SPECFORGE_RUNS_DIR', os.path.join(os.getcwd(), 'runs'))

################################################################################
# Options for different modules, defined as strings
################################################################################

# Chat context modes
same_context = 'same_context'
new_context = 'new_context'
context_modes = (same_context, new_context)

# Prompt kinds
generation = 'generation'
completeness = 'completeness'
dor = 'dor'
prompt_kinds = (generation, completeness, dor)

# Outlier policies
below_q1 = 'below_q1'
tukey = 'tukey'
outlier_policies = (below_q1, tukey)

# Report formats
plain_table_text = 'plain_table_text'
structured = 'structured'
report_formats = (plain_table_text, structured)

# Iteration decisions
pending = 'pending'
decision_continue = 'continue'
decision_terminate = 'terminate'
decisions = (pending, decision_continue, decision_terminate)

# Finding reference covering the whole document instead of one section
whole_document = 'whole-document'

################################################################################
# Protocol defaults
################################################################################

DOCS_PER_DOMAIN = 3

# Reported and recomputed DoR scores further apart than this are flagged
DISCREPANCY_TOLERANCE = 0.005

# Reviewer ratings attached to documents when a decision is recorded
RATING_SCALE = (1, 5)

PERSONA = {
    'role_description': 'experienced requirements engineer and business analyst',
}

# Live chat provider (OpenAI compatible chat completions endpoint)
LLM = {
    'endpoint': os.environ.get('SPECFORGE_LLM_ENDPOINT', 'https://api.openai.com/v1/chat/completions'),
    'api_key_env': 'SPECFORGE_LLM_API_KEY',
    'timeout': 120.0,
    'max_retries': 3,
    'backoff_base': 1.0,
    'backoff_factor': 2.0,
}

# Live embedding provider (OpenAI compatible embeddings endpoint)
EMBEDDING = {
    'endpoint': os.environ.get('SPECFORGE_EMBED_ENDPOINT', 'http://localhost:8080/v1/embeddings'),
    'api_key_env': 'SPECFORGE_EMBED_API_KEY',
    'model': 'sentence-transformers/all-mpnet-base-v2',
    'dimension': 768,
    'timeout': 60.0,
}

# Deterministic hashing embedder used with --mock and in tests
MOCK_EMBEDDING = {
    'provider_id': 'mock-hash',
    'dimension': 64,
}
