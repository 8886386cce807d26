use epinorm::scalar::ratio;
use epinorm::scenarios::racing::{racing_table, table_tsv, COINS, DEFAULT_DEPTH};

fn main() {
    let rows = racing_table(COINS, &[ratio(3, 4), ratio(19, 20)], DEFAULT_DEPTH).expect("racing table");
    print!("{}", table_tsv(&rows));
}
