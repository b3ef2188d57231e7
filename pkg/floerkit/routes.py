"""
REST API routes for Floerkit.

Every endpoint takes a JSON body {"complex": "<text format>", ...} and
answers with the same structures the CLI prints under --json.
"""

import logging
from flask import Blueprint, request, jsonify

from floerkit.classify import classify
from floerkit.complex import parse, validate
from floerkit.errors import FloerError
from floerkit.invariants import genus, hfk, hook_profile, tau
from floerkit.surgery import parse_slope, pegboard_params, surgery_rank
from floerkit.surgery import detect as detect_complex

logger = logging.getLogger(__name__)

api = Blueprint('api', __name__, url_prefix='/api')


def complex_from_request():
    """Parse the complex text out of the request body."""
    data = request.get_json(silent=True) or {}
    text = data.get('complex')
    if not isinstance(text, str):
        return None, data
    return parse(text), data


# ==================== Health Check ====================

@api.route('/health', methods=['GET'])
def health():
    return jsonify({'status': 'ok'})


# ==================== Complexes ====================

@api.route('/validate', methods=['POST'])
def validate_complex():
    try:
        c, _ = complex_from_request()
        if c is None:
            return jsonify({'error': 'Missing complex'}), 400
        return jsonify(validate(c).to_dict())
    except FloerError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Validate error: {e}")
        return jsonify({'error': 'Failed to validate complex'}), 500


@api.route('/invariants', methods=['POST'])
def invariants():
    try:
        c, _ = complex_from_request()
        if c is None:
            return jsonify({'error': 'Missing complex'}), 400
        return jsonify({
            'genus': genus(c),
            'tau': tau(c),
            'hfk': hfk(c).to_dict(),
            'hook_profile': hook_profile(c).to_dict(),
        })
    except FloerError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Invariants error: {e}")
        return jsonify({'error': 'Failed to compute invariants'}), 500


@api.route('/detect', methods=['POST'])
def detect():
    try:
        c, _ = complex_from_request()
        if c is None:
            return jsonify({'error': 'Missing complex'}), 400
        detection = detect_complex(c)
        return jsonify({**detection.to_dict(), 'summary': str(detection)})
    except FloerError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Detect error: {e}")
        return jsonify({'error': 'Failed to run detector'}), 500


@api.route('/classify', methods=['POST'])
def classify_complex():
    try:
        c, _ = complex_from_request()
        if c is None:
            return jsonify({'error': 'Missing complex'}), 400
        return jsonify(classify(c).to_dict())
    except FloerError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Classify error: {e}")
        return jsonify({'error': 'Failed to classify complex'}), 500


# ==================== Surgery ====================

@api.route('/surgery', methods=['POST'])
def surgery():
    try:
        c, data = complex_from_request()
        if c is None or not data.get('pq'):
            return jsonify({'error': 'Missing required fields'}), 400
        p, q = parse_slope(str(data['pq']))
        params = pegboard_params(c)
        return jsonify({
            'p': p,
            'q': q,
            'params': params.to_dict(),
            'rank': surgery_rank(params, p, q),
        })
    except FloerError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Surgery error: {e}")
        return jsonify({'error': 'Failed to compute surgery rank'}), 500
