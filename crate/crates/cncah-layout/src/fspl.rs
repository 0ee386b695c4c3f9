use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FsplError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

/// Free-space path loss: signal strength in dBm at `d_m` meters for a
/// transmitter at `freq_mhz`, assuming 0 dBm reference output.
/// `rssi = 27.55 − 20·log10(freq) − 20·log10(d)`.
pub fn fspl_rssi(d_m: f64, freq_mhz: f64) -> Result<f64, FsplError> {
    if !(d_m > 0.0) {
        return Err(FsplError::NonPositive("distance"));
    }
    if !(freq_mhz > 0.0) {
        return Err(FsplError::NonPositive("frequency"));
    }
    Ok(27.55 - 20.0 * freq_mhz.log10() - 20.0 * d_m.log10())
}

/// Inverse of [`fspl_rssi`]: distance in meters implied by a signal strength
/// reading. `d = 10^((27.55 − 20·log10(freq) − rssi) / 20)`.
pub fn fspl_distance(rssi_dbm: f64, freq_mhz: f64) -> Result<f64, FsplError> {
    if !(freq_mhz > 0.0) {
        return Err(FsplError::NonPositive("frequency"));
    }
    Ok(10f64.powf((27.55 - 20.0 * freq_mhz.log10() - rssi_dbm) / 20.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_meter_at_wifi_frequency() {
        let rssi = fspl_rssi(1.0, 2400.0).unwrap();
        assert!((rssi - (27.55 - 20.0 * 2400f64.log10())).abs() < 1e-12);
        assert!((rssi - -40.0542).abs() < 1e-4, "rssi {rssi}");
    }

    #[test]
    fn round_trip_is_exact_to_relative_tolerance() {
        for d in [0.1, 1.0, 10.0, 100.0] {
            for f in [900.0, 2400.0, 5800.0] {
                let back = fspl_distance(fspl_rssi(d, f).unwrap(), f).unwrap();
                assert!((back - d).abs() / d < 1e-9, "d={d} f={f} back={back}");
            }
        }
    }

    #[test]
    fn doubling_distance_costs_six_db() {
        let a = fspl_rssi(5.0, 2400.0).unwrap();
        let b = fspl_rssi(10.0, 2400.0).unwrap();
        assert!((a - b - 20.0 * 2f64.log10()).abs() < 1e-12);
        assert!((a - b - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert_eq!(fspl_rssi(0.0, 2400.0), Err(FsplError::NonPositive("distance")));
        assert_eq!(fspl_rssi(1.0, 0.0), Err(FsplError::NonPositive("frequency")));
        assert_eq!(
            fspl_distance(-40.0, -5.0),
            Err(FsplError::NonPositive("frequency"))
        );
    }
}
