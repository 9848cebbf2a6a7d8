"""
Visualization components for convergence reports and tunnel profiles
"""
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from ..config import VIZ_CONFIG


def _empty_figure(message: str) -> go.Figure:
    fig = go.Figure()
    fig.add_annotation(text=message, xref='paper', yref='paper', x=0.5, y=0.5, showarrow=False)
    fig.update_layout(template=VIZ_CONFIG['template'], height=VIZ_CONFIG['height'])
    return fig


class ConvergenceCharts:
    """Charts of the deviation and budget trends along the eps schedule"""

    @staticmethod
    def deviation_trend(trend: pd.DataFrame, title: str = None) -> go.Figure:
        """Sup deviation against eps, with the 12 eps line"""
        if trend.empty:
            return _empty_figure('No convergence data available')
        if title is None:
            title = 'Uniform deviation sup(d_Y - d_E) along the schedule'

        fig = px.line(
            trend.sort_values('eps'),
            x='eps',
            y='sup_dev',
            color='run',
            markers=True,
            title=title,
            labels={'eps': 'eps', 'sup_dev': 'sup deviation'},
            template=VIZ_CONFIG['template'],
        )
        eps = sorted(trend['eps'].unique())
        fig.add_trace(go.Scatter(
            x=eps,
            y=[12.0 * e for e in eps],
            mode='lines',
            name='12 eps',
            line=dict(color=VIZ_CONFIG['bound_color'], dash='dash'),
        ))
        fig.update_layout(height=VIZ_CONFIG['height'], xaxis=dict(autorange='reversed'))
        return fig

    @staticmethod
    def budget_trend(trend: pd.DataFrame, title: str = None) -> go.Figure:
        """Iterated d_F budget against eps on a log scale"""
        data = trend.dropna(subset=['dF_budget']) if not trend.empty else trend
        if data.empty:
            return _empty_figure('No budget data available')
        if title is None:
            title = 'Iterated filling budget along the schedule'

        fig = px.line(
            data.sort_values('eps'),
            x='eps',
            y='dF_budget',
            color='run',
            markers=True,
            log_y=True,
            title=title,
            labels={'eps': 'eps', 'dF_budget': 'd_F budget'},
            template=VIZ_CONFIG['template'],
        )
        if data['run'].nunique() == 1:
            fig.update_traces(line=dict(color=VIZ_CONFIG['budget_color']))
        fig.update_layout(height=VIZ_CONFIG['height'], xaxis=dict(autorange='reversed'))
        return fig


class ProfileCharts:
    """Charts of one tunnel profile"""

    @staticmethod
    def radius_and_curvature(rows: pd.DataFrame, title: str = None) -> go.Figure:
        """r(s) and scalar curvature R(s) on shared s"""
        if rows.empty:
            return _empty_figure('No profile samples')
        fig = make_subplots(rows=2, cols=1, shared_xaxes=True,
                            subplot_titles=('radius r(s)', 'scalar curvature R(s)'))
        fig.add_trace(go.Scatter(x=rows['s'], y=rows['r'], mode='lines', name='r',
                                 line=dict(color=VIZ_CONFIG['deviation_color'])), row=1, col=1)
        fig.add_trace(go.Scatter(x=rows['s'], y=rows['scalar_curvature'], mode='lines', name='R',
                                 line=dict(color=VIZ_CONFIG['bound_color'])), row=2, col=1)
        if (rows['scalar_curvature'] > 0).all():
            fig.update_yaxes(type='log', row=2, col=1)
        fig.update_layout(
            title=title or 'Tunnel profile',
            template=VIZ_CONFIG['template'],
            height=VIZ_CONFIG['height'] * 2,
            showlegend=False,
        )
        return fig
