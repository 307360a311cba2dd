//! Subcommand bodies. Tabular results go out as CSV.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use matisk::analysis::{instantaneous_frequency, mask_check as check_mask, welch_psd, MaskReport, SpectralMask};
use matisk::baselines::{gmsk_waveform, rrc_psk_waveform, BaselineKind, BaselineSpec};
use matisk::modulator::{differential_precode, modulate_antenna};
use matisk::{sir_sweep as run_sweep, IqSignal, Link64, SymbolFrame};

use crate::config::RunConfig;
use crate::iqfile::{convert, read_iq, write_iq};

fn csv_out<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn write_signal(path: &Path, signal: &IqSignal<f64>) -> Result<()> {
    write_iq(path, &convert::<f64, f32>(signal)).with_context(|| format!("writing {}", path.display()))
}

fn read_signal(path: &Path) -> Result<IqSignal<f64>> {
    let sig = read_iq(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(convert(&sig))
}

/// Files written by [`synth`].
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub aggregate: PathBuf,
    pub antennas: Vec<PathBuf>,
    pub omega: PathBuf,
    pub frame: PathBuf,
}

/// Synthesizes one frame into `out_dir` and prints the derived parameters.
pub fn synth(cfg: &RunConfig, out_dir: &Path, per_antenna: bool, report: &mut dyn Write) -> Result<SynthOutput> {
    let sys = cfg.system_config();
    let link = Link64::new(sys.clone())?;
    let frame = link.random_frame(cfg.frame.symbols)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    writeln!(report, "{}", sys.derived())?;

    let mut antennas = Vec::new();
    if per_antenna {
        for (n, (row, plan)) in frame.symbols.iter().zip(&link.plans).enumerate() {
            let path = out_dir.join(format!("antenna_{n:03}.iq"));
            write_signal(&path, &modulate_antenna(row, plan, &link.pulse, &sys)?)?;
            antennas.push(path);
        }
    }
    let aggregate = out_dir.join("aggregate.iq");
    write_signal(&aggregate, &link.transmit_aggregate(&frame)?)?;

    let omega = out_dir.join("omega.csv");
    write_omega(&link, std::fs::File::create(&omega)?)?;
    let frame_path = out_dir.join("frame.csv");
    write_frame(&frame, std::fs::File::create(&frame_path)?)?;
    Ok(SynthOutput {
        aggregate,
        antennas,
        omega,
        frame: frame_path,
    })
}

/// One row per subcarrier: index followed by its symbols.
pub fn write_frame<W: Write>(frame: &SymbolFrame, out: W) -> Result<()> {
    let mut w = csv_out(out);
    let mut header = vec!["subcarrier".to_string()];
    header.extend((0..frame.n_symbols()).map(|k| format!("s{k}")));
    w.write_record(&header)?;
    for (n, row) in frame.symbols.iter().enumerate() {
        w.write_record(std::iter::once(n.to_string()).chain(row.iter().map(u32::to_string)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_frame(path: &Path, m_order: usize) -> Result<SymbolFrame> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let idx: usize = rec.get(0).unwrap_or("").parse().with_context(|| format!("row {i}: subcarrier"))?;
        ensure!(idx == i, "row {i} holds subcarrier {idx}");
        let row = rec
            .iter()
            .skip(1)
            .map(|v| v.parse::<u32>().with_context(|| format!("row {i}: symbol {v:?}")))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(SymbolFrame::new(rows, m_order)?)
}

pub fn write_omega<W: Write>(link: &Link64, out: W) -> Result<()> {
    let m = link.cfg.psk_order;
    let mut w = csv_out(out);
    let mut header: Vec<String> = ["subcarrier", "freq_hz", "omega"].map(String::from).to_vec();
    header.extend((0..m).map(|i| format!("shift_{i}_rad")));
    header.push("peak_deviation_hz".into());
    w.write_record(&header)?;
    for (n, set) in link.omega.shift_sets.iter().enumerate() {
        let mut rec = vec![n.to_string(), link.cfg.subcarrier_freq_hz(n).to_string(), set.omega_bits()];
        rec.extend(set.shifts.iter().map(f64::to_string));
        rec.push(link.omega.peak_deviation_hz[n].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn omega<W: Write>(cfg: &RunConfig, out: W) -> Result<()> {
    write_omega(&Link64::new(cfg.system_config())?, out)
}

/// Headline numbers of a [`demod`] run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemodSummary {
    pub sir_db: f64,
    pub differential_sir_db: f64,
    pub symbol_errors: usize,
}

/// Demodulates an aggregate IQ file against the frame in `frame_path`, or
/// against the frame regenerated from the configured seed.
pub fn demod<W: Write>(cfg: &RunConfig, input: &Path, frame_path: Option<&Path>, out: W) -> Result<DemodSummary> {
    let sys = cfg.system_config();
    let signal = read_signal(input)?;
    let rate = sys.sample_rate_hz();
    ensure!(
        (signal.sample_rate_hz - rate).abs() <= 1e-9 * rate,
        "file sample rate {} Hz does not match configured {} Hz",
        signal.sample_rate_hz,
        rate
    );
    let link = Link64::new(sys.clone())?;
    let frame = match frame_path {
        Some(p) => read_frame(p, sys.psk_order)?,
        None => link.random_frame(signal.len() / sys.samples_per_symbol())?,
    };
    let report = link.receive(&signal, &frame)?;

    let mut w = csv_out(out);
    w.write_record(["subcarrier", "freq_hz", "sir_db", "differential_sir_db", "symbol_errors"])?;
    for n in 0..sys.n_subcarriers {
        let decided = differential_precode(&report.decisions[n], sys.psk_order);
        let sent = differential_precode(&frame.symbols[n], sys.psk_order);
        let errors = decided.iter().zip(&sent).skip(1).filter(|(a, b)| a != b).count();
        w.write_record([
            n.to_string(),
            sys.subcarrier_freq_hz(n).to_string(),
            report.per_subcarrier_sir_db[n].to_string(),
            report.differential_per_subcarrier_sir_db[n].to_string(),
            errors.to_string(),
        ])?;
    }
    w.write_record([
        "all".to_string(),
        String::new(),
        report.sir_db.to_string(),
        report.differential_sir_db.to_string(),
        report.symbol_errors.to_string(),
    ])?;
    w.write_record([
        "mean_of_ratios".to_string(),
        String::new(),
        report.mean_of_ratios_sir_db.to_string(),
        String::new(),
        String::new(),
    ])?;
    w.flush()?;
    Ok(DemodSummary {
        sir_db: report.sir_db,
        differential_sir_db: report.differential_sir_db,
        symbol_errors: report.symbol_errors,
    })
}

pub fn sir_sweep<W: Write>(cfg: &RunConfig, t_min: usize, t_max: usize, out: W) -> Result<()> {
    ensure!(t_min <= t_max, "--t-min {t_min} exceeds --t-max {t_max}");
    let points = run_sweep::<f64>(&cfg.system_config(), t_min..=t_max, cfg.frame.symbols)?;
    let mut w = csv_out(out);
    w.write_record(["repetition", "sir_db", "differential_sir_db", "symbol_errors"])?;
    for p in points {
        w.write_record([
            p.repetition.to_string(),
            p.sir_db.to_string(),
            p.differential_sir_db.to_string(),
            p.symbol_errors.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// PSD of `input`, or of the synthesized aggregate plus the leftmost,
/// center and rightmost antennas. Each curve is given relative to its peak
/// and to the uniform in-band density.
pub fn psd<W: Write>(cfg: &RunConfig, input: Option<&Path>, out: W) -> Result<()> {
    let sys = cfg.system_config();
    let mut curves: Vec<(String, IqSignal<f64>)> = Vec::new();
    match input {
        Some(path) => curves.push(("input".into(), read_signal(path)?)),
        None => {
            let link = Link64::new(sys.clone())?;
            let frame = link.random_frame(cfg.frame.symbols)?;
            curves.push(("aggregate".into(), link.transmit_aggregate(&frame)?));
            let mut picks = vec![0, sys.n_subcarriers / 2, sys.n_subcarriers - 1];
            picks.dedup();
            for n in picks {
                let sig = modulate_antenna(&frame.symbols[n], &link.plans[n], &link.pulse, &sys)?;
                curves.push((format!("antenna_{n}"), sig));
            }
        }
    }
    let inband = sys.derived().occupied_bandwidth_hz;
    let estimates = curves
        .iter()
        .map(|(_, sig)| welch_psd(sig, cfg.segment_len(), cfg.psd.overlap, cfg.psd.window.into()))
        .collect::<matisk::Result<Vec<_>>>()?;

    let mut w = csv_out(out);
    let mut header = vec!["freq_hz".to_string()];
    for (name, _) in &curves {
        header.push(format!("{name}_db_rel_peak"));
        header.push(format!("{name}_db_rel_inband"));
    }
    w.write_record(&header)?;
    let columns: Vec<(Vec<f64>, Vec<f64>)> =
        estimates.iter().map(|e| (e.db_rel_peak(), e.db_rel_inband(inband))).collect();
    for (i, f) in estimates[0].freqs_hz.iter().enumerate() {
        let mut rec = vec![f.to_string()];
        for (peak, band) in &columns {
            rec.push(peak[i].to_string());
            rec.push(band[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Instantaneous frequency of every antenna, one row per `stride` samples.
pub fn instfreq<W: Write>(cfg: &RunConfig, stride: usize, out: W) -> Result<()> {
    ensure!(stride > 0, "stride must be positive");
    let sys = cfg.system_config();
    let link = Link64::new(sys.clone())?;
    let frame = link.random_frame(cfg.frame.symbols)?;
    let traces = frame
        .symbols
        .iter()
        .zip(&link.plans)
        .map(|(row, plan)| {
            let f = instantaneous_frequency(&modulate_antenna(row, plan, &link.pulse, &sys)?)?;
            Ok(f.into_iter().step_by(stride).collect::<Vec<f64>>())
        })
        .collect::<matisk::Result<Vec<_>>>()?;

    let mut w = csv_out(out);
    let mut header = vec!["time_s".to_string()];
    header.extend((0..sys.n_subcarriers).map(|n| format!("f_{n}_hz")));
    w.write_record(&header)?;
    let dt = 1.0 / sys.sample_rate_hz();
    for i in 0..traces[0].len() {
        // each value covers the sample pair starting at i * stride
        let mut rec = vec![((i * stride) as f64 * dt).to_string()];
        rec.extend(traces.iter().map(|t| t[i].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BaselineName {
    GmskBinary,
    GmskQuaternary,
    GmskRepetition,
    RrcPsk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineParams {
    pub kind: BaselineName,
    pub bt: f64,
    pub rolloff: f64,
    pub repetition: usize,
    pub repeated_shift: f64,
    pub psk_order: Option<usize>,
    pub symbols: usize,
    pub seed: u64,
    pub oversampling: usize,
    pub segment_symbols: usize,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            kind: BaselineName::GmskBinary,
            bt: 0.3,
            rolloff: 0.22,
            repetition: 1,
            repeated_shift: std::f64::consts::FRAC_PI_2,
            psk_order: None,
            symbols: 4000,
            seed: 0,
            oversampling: 16,
            segment_symbols: 64,
        }
    }
}

impl BaselineParams {
    pub fn spec(&self) -> Result<BaselineSpec> {
        let ts = 1e-6;
        let mut spec = match self.kind {
            BaselineName::GmskBinary => BaselineSpec::gmsk_binary(self.bt, ts),
            BaselineName::GmskQuaternary => BaselineSpec::gmsk_quaternary(self.bt, ts),
            BaselineName::GmskRepetition => BaselineSpec::gmsk_repetition(
                self.bt,
                self.repetition,
                self.repeated_shift,
                self.psk_order.unwrap_or(4),
                ts,
            ),
            BaselineName::RrcPsk => BaselineSpec::rrc_psk(self.rolloff, self.psk_order.unwrap_or(4), ts),
        };
        if let Some(m) = self.psk_order {
            if m != spec.psk_order {
                bail!("{:?} is fixed to {}-ary symbols", self.kind, spec.psk_order);
            }
        }
        if self.kind != BaselineName::GmskRepetition && self.repetition != 1 {
            bail!("--repetition applies to gmsk-repetition only");
        }
        spec.oversampling = self.oversampling;
        Ok(spec)
    }
}

/// PSD of a reference waveform against frequency normalized to the symbol rate.
pub fn baseline<W: Write>(params: &BaselineParams, out: W) -> Result<()> {
    let spec = params.spec()?;
    let symbols = SymbolFrame::random(1, params.symbols, spec.psk_order, params.seed)?.symbols.remove(0);
    let signal: IqSignal<f64> = match spec.kind {
        BaselineKind::LinearPskRrc => rrc_psk_waveform(&spec, &symbols)?,
        _ => gmsk_waveform(&spec, &symbols)?,
    };
    let segment = params.segment_symbols * spec.repetition * spec.oversampling;
    let est = welch_psd(&signal, segment, 0.5, matisk::analysis::Window::Hann)?;
    let mut w = csv_out(out);
    w.write_record(["freq_per_symbol_rate", "psd_db_rel_peak"])?;
    for (f, p) in est.freqs_hz.iter().zip(est.db_rel_peak()) {
        w.write_record([(f * spec.symbol_period_s).to_string(), p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Checks `input`, or the synthesized aggregate of `cfg`, against a mask.
/// Per-bin margins go to `bins`, the summary to `summary`.
pub fn mask_check<B: Write, S: Write>(
    cfg: &RunConfig,
    mask_path: Option<&Path>,
    input: Option<&Path>,
    bins: Option<B>,
    summary: S,
) -> Result<MaskReport> {
    let sys = cfg.system_config();
    let path = match mask_path.map(Path::to_path_buf).or_else(|| cfg.mask_path()) {
        Some(p) => p,
        None => bail!("no mask given: pass --mask or set [mask] path in the configuration"),
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let mask = SpectralMask::parse(&text).with_context(|| format!("in {}", path.display()))?;
    let signal = match input {
        Some(p) => read_signal(p)?,
        None => {
            let link = Link64::new(sys.clone())?;
            link.transmit_aggregate(&link.random_frame(cfg.frame.symbols)?)?
        }
    };
    let est = welch_psd(&signal, cfg.segment_len(), cfg.psd.overlap, cfg.psd.window.into())?;
    let inband = cfg
        .mask
        .as_ref()
        .and_then(|m| m.inband_hz)
        .unwrap_or(sys.derived().occupied_bandwidth_hz);
    let report = check_mask(&est, &mask, inband)?;

    if let Some(bins) = bins {
        let mut w = csv_out(bins);
        w.write_record(["freq_hz", "psd_db_rel_inband", "limit_db", "margin_db"])?;
        for (f, level) in est.freqs_hz.iter().zip(est.db_rel_inband(inband)) {
            let limit = mask.limit_at(*f).expect("mask covers the estimate");
            w.write_record([f.to_string(), level.to_string(), limit.to_string(), (limit - level).to_string()])?;
        }
        w.flush()?;
    }
    let mut w = csv_out(summary);
    w.write_record(["pass", "worst_margin_db", "worst_freq_hz", "offending_bins"])?;
    w.write_record([
        report.pass.to_string(),
        report.worst_margin_db.to_string(),
        report.worst_freq_hz.to_string(),
        report.offending.len().to_string(),
    ])?;
    w.flush()?;
    Ok(report)
}
